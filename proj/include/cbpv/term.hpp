#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cbpv/error.hpp"
#include "cbpv/path.hpp"

namespace cbpv {

enum class ArithOp { Add, Sub, Mul };

// Two's complement wraparound, shared by every machine.
std::int64_t apply_arith(ArithOp op, std::int64_t a, std::int64_t b);
const char* symbol(ArithOp op);    // "+", "-", "*"
const char* mnemonic(ArithOp op);  // "ADD", "SUB", "MUL"

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct VarV {
  std::string name;
};
struct NumV {
  std::int64_t n;
};
struct ThunkV {
  TermPtr body;
};
using Value = std::variant<VarV, NumV, ThunkV>;

struct Force {
  Value v;
};
struct Prd {
  Value v;
};
struct App {
  Value arg;
  TermPtr body;
};
struct Lam {
  std::string binder;
  TermPtr body;
};
struct Seq {
  TermPtr left;
  std::string binder;
  TermPtr right;
};
struct Def {
  std::string name;
  TermPtr body;
};
struct LetRec {
  std::vector<Def> defs;
  TermPtr body;
};
struct If0 {
  Value guard;
  TermPtr then_branch;
  TermPtr else_branch;
};
struct Op {
  Value lhs;
  ArithOp op;
  Value rhs;
};

struct Term {
  using Node = std::variant<Force, Prd, App, Lam, Seq, LetRec, If0, Op>;

  explicit Term(Node n);

  Node node;
  std::vector<std::string> fv;  // sorted, computed once
  std::size_t size = 1;         // number of computation and value nodes

  template <class T>
  const T* as() const { return std::get_if<T>(&node); }
  template <class T>
  bool is() const { return std::holds_alternative<T>(node); }
};

namespace build {
Value var(std::string x);
Value num(std::int64_t n);
Value thunk(TermPtr m);
TermPtr force(Value v);
TermPtr prd(Value v);
TermPtr app(Value v, TermPtr m);
TermPtr lam(std::string x, TermPtr m);
TermPtr seq(TermPtr n, std::string x, TermPtr m);
TermPtr letrec(std::vector<Def> defs, TermPtr body);
TermPtr if0(Value v, TermPtr m1, TermPtr m2);
TermPtr op(Value a, ArithOp o, Value b);
}  // namespace build

using NodeRef = std::variant<const Term*, const Value*>;

NodeRef subterm_at(const Term& root, const Path& p);
NodeRef child_node(NodeRef parent, std::uint32_t n);  // throws InvalidPath
const Term& computation_at(const Term& root, const Path& p);
const Value& value_at(const Term& root, const Path& p);

struct LamBind {
  Path at;
};
struct SeqBind {
  Path at;
};
struct RecBind {
  Path at;
  std::size_t index;  // 1-based, leftmost definition with that name
};
struct FreeVar {
  std::string name;
};
using BinderRef = std::variant<LamBind, SeqBind, RecBind, FreeVar>;

BinderRef resolve_binder(const Term& root, const Path& occ);

std::vector<std::string> free_vars(const Term& m);
std::vector<std::string> free_vars(const Value& v);

using Subst = std::map<std::string, Value>;

TermPtr substitute(const TermPtr& m, const Subst& s);
Value substitute(const Value& v, const Subst& s);
// Substitute under a single binder x; returns the possibly renamed binder.
std::pair<std::string, TermPtr> substitute_under(const std::string& x, const TermPtr& m,
                                                 const Subst& s);

bool alpha_eq(const Term& a, const Term& b);
bool alpha_eq(const Value& a, const Value& b);
inline bool alpha_eq(const TermPtr& a, const TermPtr& b) { return alpha_eq(*a, *b); }

std::string print(const Term& m);
std::string print(const Value& v);
inline std::string print(const TermPtr& m) { return print(*m); }

// Structural equality; names must match exactly.
bool same(const Term& a, const Term& b);
bool same(const Value& a, const Value& b);

}  // namespace cbpv
