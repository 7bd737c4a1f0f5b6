#pragma once

#include <string>
#include <vector>

#include "cbpv/outcome.hpp"
#include "cbpv/term.hpp"

namespace cbpv {

enum class Machine { Sos, Cek, Peak, Pek, Cfg };
const char* to_string(Machine m);
bool parse_machine(const std::string& s, Machine& out);

struct MachineRun {
  std::size_t steps = 0;
  Observation obs;
  TermPtr residual;                 // unload of the last state reached
  std::vector<std::string> trace;  // one line per visited state when tracing
};

// Runs m from load on the chosen machine for at most fuel steps.
MachineRun run_machine(Machine which, const TermPtr& m, std::size_t fuel, bool trace = false);

}  // namespace cbpv
