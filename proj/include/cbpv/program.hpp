#pragma once

#include <unordered_map>
#include <vector>

#include "cbpv/term.hpp"

namespace cbpv {

struct AFrame {
  enum class Kind { Arg, Seq };
  Kind kind;
  Path at;  // the App or Seq node that pushed the frame

  friend bool operator==(const AFrame&, const AFrame&) = default;
  std::string str() const;
};

// A source term together with the static tables the path-based machines
// consult. Immutable after construction, so it may be shared freely.
class Program {
 public:
  explicit Program(TermPtr root);

  const TermPtr& root() const { return root_; }
  NodeRef at(const Path& p) const { return subterm_at(*root_, p); }
  const Term& computation(const Path& p) const { return computation_at(*root_, p); }
  const Value& value(const Path& p) const { return value_at(*root_, p); }

  const BinderRef& binder(const Path& occ) const;
  const std::vector<std::string>& free_names() const { return root_->fv; }

  // Force, Prd, Lam, If0 and Op nodes, in preorder.
  const std::vector<Path>& instruction_positions() const { return instrs_; }

 private:
  TermPtr root_;
  std::unordered_map<Path, BinderRef, PathHash> binders_;
  std::vector<Path> instrs_;
};

bool is_instruction(const Term& t);
bool is_search(const Term& t);  // App, Seq, LetRec

// First instruction position reached by following search children.
Path eta(const Program& prog, const Path& p);

// Static argument stack at p, top frame first.
std::vector<AFrame> aframes(const Program& prog, const Path& p);

// Inverse of eta along the search spine: climb while the parent is a
// search node entered through its search child.
Path spine_root(const Program& prog, const Path& p);

// Lam (entered by child 0) and Seq (entered by child 1) ancestors of p:
// the binders whose values must be present in an environment at p.
std::vector<Path> scope_binders(const Program& prog, const Path& p);

// For a path j::q where q is a LetRec and j >= 1, the LetRec path.
std::optional<Path> letrec_def_parent(const Program& prog, const Path& p);

}  // namespace cbpv
