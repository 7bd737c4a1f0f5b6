#pragma once

#include <string>
#include <vector>

#include "cbpv/cek.hpp"
#include "cbpv/outcome.hpp"
#include "cbpv/plist.hpp"
#include "cbpv/program.hpp"
#include "cbpv/pval.hpp"

namespace cbpv::peak {

using Args = PList<AFrame>;

struct KArg {
  PVal v;
};
struct KSeq {
  Path at;
  PEnv env;
  Args args;
};
struct KFrame {
  std::variant<KArg, KSeq> f;
};
using Kont = PList<KFrame>;

struct PeakState {
  Path pc;
  PEnv env;
  Args args;
  Kont kont;
};

struct Next {
  PeakState state;
};
using StepResult = std::variant<Next, Terminal<PVal>, Stuck>;

PeakState load(const Program& prog);

PVal lookup_var(const Program& prog, const Path& p, const PEnv& e);  // throws MissingBinding
PVal gamma(const Program& prog, const Path& p, const PEnv& e);

// Converts frames up to and including the first SEQ; top first.
std::vector<KFrame> delta(const Program& prog, const PEnv& e, const Args& a);

PeakState advance(const Program& prog, const PeakState& s);
StepResult fire(const Program& prog, const PeakState& s);
StepResult step(const Program& prog, const PeakState& s);

cek::CekState unload(const Program& prog, const PeakState& s);
cek::CekVal unload_v(const Program& prog, const PVal& v);
cek::CekEnv unload_e(const Program& prog, const Path& p, const PEnv& e);

struct WfReport {
  bool ok = true;
  std::vector<std::string> violations;
};
WfReport wf_check(const Program& prog, const PeakState& s);

// Scope binders of p with no entry in e.
std::vector<Path> missing_binders(const Program& prog, const Path& p, const PEnv& e);

bool same(const PeakState& a, const PeakState& b);
std::string trace_line(std::size_t i, const PeakState& s);

}  // namespace cbpv::peak
