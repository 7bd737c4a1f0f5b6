#pragma once

#include <optional>
#include <vector>

#include "cbpv/outcome.hpp"
#include "cbpv/term.hpp"

namespace cbpv::sos {

struct Next {
  TermPtr term;
};
using StepResult = std::variant<Next, Terminal<Value>, Stuck>;

// Replaces letrec heads by their bodies with each name bound to a thunk of
// the bundle, until the head is something else.
TermPtr unroll(const TermPtr& m);

// One small step. Letrecs on the evaluation spine are unrolled on the way
// down; that is bookkeeping, not a step of its own.
StepResult step(const TermPtr& m);

// Number of evaluation-context frames above the redex (a frame the rule
// consumes counts as part of the redex), or nothing when the
// term is terminal or stuck.
std::optional<std::size_t> redex_depth(const TermPtr& m);

using End = std::variant<Terminal<Value>, Stuck, FuelExhausted>;

struct RunResult {
  std::size_t steps = 0;
  End end;
  TermPtr last;                // term at which the run ended
  std::vector<TermPtr> trace;  // every visited term, when requested
};

RunResult run(const TermPtr& m, std::size_t fuel, bool keep_trace = false);

Observation observe_value(const Value& v);
Observation observe(const End& e);
Equivalence observe_equiv(const TermPtr& m, const TermPtr& n, std::size_t fuel);

}  // namespace cbpv::sos
