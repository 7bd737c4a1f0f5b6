#pragma once

#include "cbpv/peak.hpp"

namespace cbpv::pek {

struct KArg {
  PVal v;
};
struct KRet {
  Path bind;
  Path resume;
  PEnv env;
};
struct KFrame {
  std::variant<KArg, KRet> f;
};
using Kont = PList<KFrame>;

struct PekState {
  Path pc;
  PEnv env;
  Kont kont;
};

struct Next {
  PekState state;
};
using StepResult = std::variant<Next, Terminal<PVal>, Stuck>;

PekState load(const Program& prog);

// Like peak::gamma, but closure entries are already advanced by eta.
PVal gamma(const Program& prog, const Path& p, const PEnv& e);
std::vector<KFrame> delta(const Program& prog, const PEnv& e, const std::vector<AFrame>& a);

StepResult step(const Program& prog, const PekState& s);

// pc and closure entries map back to their spine roots, where the
// argument stack is the static aframes.
peak::PeakState unload(const Program& prog, const PekState& s);
PVal unload_v(const Program& prog, const PVal& v);

peak::WfReport wf_check(const Program& prog, const PekState& s);

bool same(const PekState& a, const PekState& b);
std::string trace_line(std::size_t i, const PekState& s);

}  // namespace cbpv::pek
