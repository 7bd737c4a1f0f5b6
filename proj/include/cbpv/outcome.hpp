#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace cbpv {

enum class TerminalKind { ProducedValue, AwaitingArgument, BareArith };

enum class StuckReason {
  ForceNonThunk,
  GuardNotNumeral,
  ApplyNonFunction,
  SequencedNonProducer,
  ArithNonNumeral,
  UnboundPath,
};

const char* to_string(TerminalKind k);
const char* to_string(StuckReason r);

template <class V>
struct Terminal {
  TerminalKind kind;
  std::optional<V> value;  // empty for AwaitingArgument
};

struct Stuck {
  StuckReason reason;
};

struct FuelExhausted {};

// What a finished run looks like from outside. Thunk answers are opaque:
// any two thunks observe the same.
struct Observation {
  enum class Kind { Number, Symbol, Thunk, Awaiting, Stuck, OutOfFuel };
  Kind kind;
  std::int64_t number = 0;
  std::string symbol;
  StuckReason reason = StuckReason::ForceNonThunk;

  // Stuck reasons are not part of the observation.
  bool operator==(const Observation& o) const {
    if (kind != o.kind) return false;
    if (kind == Kind::Number) return number == o.number;
    if (kind == Kind::Symbol) return symbol == o.symbol;
    return true;
  }
  std::string str() const;
};

enum class Equivalence { Equivalent, Inequivalent, Unknown };
const char* to_string(Equivalence e);

}  // namespace cbpv
