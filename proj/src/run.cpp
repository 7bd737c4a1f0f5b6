#include "cbpv/run.hpp"

#include "cbpv/cek.hpp"
#include "cbpv/cfg.hpp"
#include "cbpv/peak.hpp"
#include "cbpv/pek.hpp"
#include "cbpv/sos.hpp"

namespace cbpv {

const char* to_string(Machine m) {
  switch (m) {
    case Machine::Sos: return "sos";
    case Machine::Cek: return "cek";
    case Machine::Peak: return "peak";
    case Machine::Pek: return "pek";
    case Machine::Cfg: return "cfg";
  }
  return "?";
}

bool parse_machine(const std::string& s, Machine& out) {
  for (auto m : {Machine::Sos, Machine::Cek, Machine::Peak, Machine::Pek, Machine::Cfg})
    if (s == to_string(m)) {
      out = m;
      return true;
    }
  return false;
}

namespace {

Observation of_kind(Observation::Kind k) {
  Observation o{};
  o.kind = k;
  return o;
}

Observation obs_cek(const cek::CekVal& v) {
  Observation o{};
  if (auto n = std::get_if<cek::NumC>(&v.v)) {
    o.kind = Observation::Kind::Number;
    o.number = n->n;
  } else if (auto x = std::get_if<cek::SymVar>(&v.v)) {
    o.kind = Observation::Kind::Symbol;
    o.symbol = x->name;
  } else {
    o.kind = Observation::Kind::Thunk;
  }
  return o;
}

Observation obs_p(const PVal& v) {
  Observation o{};
  if (auto n = std::get_if<NumP>(&v.v)) {
    o.kind = Observation::Kind::Number;
    o.number = n->n;
  } else if (auto x = std::get_if<SymVar>(&v.v)) {
    o.kind = Observation::Kind::Symbol;
    o.symbol = x->name;
  } else {
    o.kind = Observation::Kind::Thunk;
  }
  return o;
}

template <class V, class F>
Observation terminal_obs(const Terminal<V>& t, F conv) {
  if (t.kind == TerminalKind::AwaitingArgument) return of_kind(Observation::Kind::Awaiting);
  return conv(*t.value);
}

Observation stuck_obs(const Stuck& s) {
  Observation o = of_kind(Observation::Kind::Stuck);
  o.reason = s.reason;
  return o;
}

// Shared driver: step until a non-Next result or fuel runs out.
template <class S, class Step, class Conv, class Unload, class Line>
MachineRun drive(S s, std::size_t fuel, bool trace, Step step, Conv conv, Unload unload, Line line) {
  MachineRun out;
  out.obs = of_kind(Observation::Kind::OutOfFuel);
  for (;;) {
    if (trace) out.trace.push_back(line(out.steps, s));
    auto r = step(s);
    using R = decltype(r);
    using N = std::variant_alternative_t<0, R>;
    using T = std::variant_alternative_t<1, R>;
    if (auto nx = std::get_if<N>(&r)) {
      if (out.steps == fuel) break;
      ++out.steps;
      s = nx->state;
      continue;
    }
    if (auto t = std::get_if<T>(&r)) out.obs = terminal_obs(*t, conv);
    else out.obs = stuck_obs(std::get<Stuck>(r));
    break;
  }
  out.residual = unload(s);
  return out;
}

}  // namespace

MachineRun run_machine(Machine which, const TermPtr& m, std::size_t fuel, bool trace) {
  if (which == Machine::Sos) {
    auto r = sos::run(m, fuel, trace);
    MachineRun out;
    out.steps = r.steps;
    out.obs = sos::observe(r.end);
    out.residual = r.last;
    for (std::size_t i = 0; i < r.trace.size(); ++i)
      out.trace.push_back("sos " + std::to_string(i) + ": " + print(r.trace[i]));
    return out;
  }
  if (which == Machine::Cek) {
    return drive(
        cek::load(m), fuel, trace, [](const cek::CekState& s) { return cek::step(s); }, obs_cek,
        [](const cek::CekState& s) { return cek::unload(s); },
        [](std::size_t i, const cek::CekState& s) { return cek::trace_line(i, s); });
  }
  Program prog(m);
  if (which == Machine::Peak) {
    return drive(
        peak::load(prog), fuel, trace, [&](const peak::PeakState& s) { return peak::step(prog, s); },
        obs_p, [&](const peak::PeakState& s) { return cek::unload(peak::unload(prog, s)); },
        [](std::size_t i, const peak::PeakState& s) { return peak::trace_line(i, s); });
  }
  if (which == Machine::Pek) {
    return drive(
        pek::load(prog), fuel, trace, [&](const pek::PekState& s) { return pek::step(prog, s); },
        obs_p, [&](const pek::PekState& s) { return cfg::unload(prog, s); },
        [](std::size_t i, const pek::PekState& s) { return pek::trace_line(i, s); });
  }
  auto g = cfg::compile(prog);
  return drive(
      pek::load(prog), fuel, trace, [&](const cfg::State& s) { return cfg::step(g, s); }, obs_p,
      [&](const cfg::State& s) { return cfg::unload(prog, s); },
      [&](std::size_t i, const cfg::State& s) { return cfg::trace_line(i, g, s); });
}

}  // namespace cbpv
