#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "cbpv/cfg.hpp"
#include "cbpv/rewriter.hpp"
#include "cbpv/term.hpp"

namespace cbpv::harness {

enum class LevelPair { SosCek, CekPeak, PeakPek, PekCfg };
enum class Mode { Strict, ModuloAdvance };
const char* to_string(LevelPair p);

struct Failure {
  std::size_t step;
  std::string level;
  std::string expected;
  std::string actual;
};

struct Report {
  TermPtr program;
  std::size_t steps_checked = 0;
  std::optional<Failure> failure;
  bool finished = false;  // reached Terminal or Stuck within fuel
  Observation answer{};   // meaningful when finished

  bool pass() const { return !failure; }
  std::string str() const;  // one line
};

// Runs the lower machine of the pair from load and checks the commutation
// square at every step, plus the lower level's well-formedness predicate.
Report lockstep_check(const TermPtr& m, LevelPair pair, std::size_t fuel, Mode mode = Mode::Strict,
                      cfg::Mutation mut = cfg::Mutation::None);

// Runs the CFG machine and checks each step against the SOS on unloaded
// terms.
Report cfg_sos_check(const TermPtr& m, std::size_t fuel, cfg::Mutation mut = cfg::Mutation::None);

// unload(load(m)) at each level against m.
Report roundtrip_check(const TermPtr& m);

// Every path in every visited CFG state also appears in the compiled graph.
Report path_check(const TermPtr& m, std::size_t fuel);

// Runs the SOS and CFG machines side by side and requires them to stop in
// the same way at alpha-equal residuals.
Report stuck_alignment_check(const TermPtr& m, std::size_t fuel);

struct GenOptions {
  bool closed = true;
  bool ill_formed = false;            // allow kind-incorrect values and applications
  std::optional<RuleId> plant;        // guarantee a redex of this rule
};

// Deterministic for a given (seed, size, options). Result size is at most
// max(size, 2) nodes (plus the planted redex's minimum shape, when asked).
TermPtr gen_term(std::uint64_t seed, std::size_t size, const GenOptions& opt = {});

}  // namespace cbpv::harness
