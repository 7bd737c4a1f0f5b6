#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cbpv/outcome.hpp"
#include "cbpv/path.hpp"
#include "cbpv/term.hpp"

namespace cbpv {

enum class RuleId { ForceThunk, Beta, MoveElim, ConstFold, Inline, DeadTrue, DeadFalse, BranchElim };

const char* to_string(RuleId r);
std::optional<RuleId> parse_rule(const std::string& s);
const std::vector<RuleId>& all_rules();

struct Redex {
  RuleId rule;
  Path at;
};

struct RewriteStep {
  RuleId rule;
  Path at;
  TermPtr before;
  TermPtr after;
  std::string str() const;  // "<rule> @ <path>"
};

// Producer shape: prd, arithmetic, or search/branch forms whose every exit
// is one of those. Used by the right-unit form of MoveElim.
bool producer_shaped(const Term& m);

bool matches(const Term& m, RuleId r);

// Every matching (rule, position), positions in preorder, rules in enum
// order at each position.
std::vector<Redex> find_redexes(const TermPtr& m);

// Rewrites the computation at `at`; throws NoMatch.
TermPtr apply_rule(const TermPtr& m, RuleId r, const Path& at);

// Replaces the computation at p.
TermPtr replace_at(const TermPtr& m, const Path& p, const TermPtr& sub);

struct Optimized {
  TermPtr result;
  std::vector<RewriteStep> log;
};
Optimized optimize(const TermPtr& m, const std::set<RuleId>& rules, std::size_t max_passes = 1000);

struct ValidationCase {
  Subst valuation;
  Observation sos_lhs, sos_rhs, cfg_lhs, cfg_rhs;
  Equivalence sos = Equivalence::Unknown;
  Equivalence cfg = Equivalence::Unknown;
  std::vector<std::string> problems;
};

struct ValidationReport {
  bool ok = true;
  std::vector<ValidationCase> cases;
  std::string str() const;
};

// Checks equivalence by running both terms under each valuation on the SOS
// and on the compiled CFG. A disagreement between the two layers on either
// term is also reported.
ValidationReport validate(const TermPtr& m, const TermPtr& m2, std::size_t fuel,
                          const std::vector<Subst>& valuations);

}  // namespace cbpv
