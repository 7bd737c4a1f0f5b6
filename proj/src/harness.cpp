#include "cbpv/harness.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include "cbpv/cek.hpp"
#include "cbpv/error.hpp"
#include "cbpv/peak.hpp"
#include "cbpv/pek.hpp"
#include "cbpv/run.hpp"
#include "cbpv/sos.hpp"

namespace cbpv::harness {

const char* to_string(LevelPair p) {
  switch (p) {
    case LevelPair::SosCek: return "SOS_CEK";
    case LevelPair::CekPeak: return "CEK_PEAK";
    case LevelPair::PeakPek: return "PEAK_PEK";
    case LevelPair::PekCfg: return "PEK_CFG";
  }
  return "?";
}

std::string Report::str() const {
  if (!failure) return "pass: " + std::to_string(steps_checked) + " steps" + (finished ? ", " + answer.str() : "");
  return "FAIL step " + std::to_string(failure->step) + " [" + failure->level + "]: expected " +
         failure->expected + "; actual " + failure->actual;
}

namespace {

// Payload-free view of a step result, used to compare classifications.
struct Shape {
  enum { Next, Term, Stuck } tag;
  TerminalKind kind = TerminalKind::ProducedValue;
  StuckReason reason = StuckReason::ForceNonThunk;
  std::string str() const {
    if (tag == Next) return "Next";
    if (tag == Term) return std::string("Terminal ") + cbpv::to_string(kind);
    return std::string("Stuck ") + cbpv::to_string(reason);
  }
};

template <class R>
Shape shape(const R& r) {
  using T = std::variant_alternative_t<1, R>;
  if (r.index() == 0) return {Shape::Next};
  if (auto t = std::get_if<T>(&r)) return {Shape::Term, t->kind};
  return {Shape::Stuck, TerminalKind::ProducedValue, std::get<cbpv::Stuck>(r).reason};
}

bool same_shape(const Shape& a, const Shape& b, bool reasons) {
  if (a.tag != b.tag) return false;
  if (a.tag == Shape::Term) return a.kind == b.kind;
  if (a.tag == Shape::Stuck && reasons) return a.reason == b.reason;
  return true;
}

Value value_of(const Program& prog, const PVal& v) { return cek::unload_val(peak::unload_v(prog, v)); }
Value value_of_pek(const Program& prog, const PVal& v) { return value_of(prog, pek::unload_v(prog, v)); }

std::string show(const std::optional<Value>& v) { return v ? print(*v) : "-"; }

bool same_value(const std::optional<Value>& a, const std::optional<Value>& b) {
  if (!a || !b) return !a && !b;
  return alpha_eq(*a, *b);
}

Observation observe_v(const std::optional<Value>& v, TerminalKind k) {
  if (k == TerminalKind::AwaitingArgument) {
    Observation o{};
    o.kind = Observation::Kind::Awaiting;
    return o;
  }
  return sos::observe_value(*v);
}

// Common bookkeeping for a check loop.
struct Ctx {
  Report rep;
  bool fail(std::size_t step, std::string level, std::string expected, std::string actual) {
    rep.failure = Failure{step, std::move(level), std::move(expected), std::move(actual)};
    return false;
  }
  void finish(const Observation& o) {
    rep.finished = true;
    rep.answer = o;
  }
};

std::string wf_text(const peak::WfReport& w) {
  std::string out;
  for (auto& v : w.violations) out += (out.empty() ? "" : "; ") + v;
  return out;
}

Report sos_cek(const TermPtr& m, std::size_t fuel) {
  Ctx c;
  c.rep.program = m;
  auto fv = m->fv;
  cek::CekState s = cek::load(m);
  TermPtr t = m;  // independent SOS trajectory
  cek::WfChecker wf(fv);
  for (std::size_t k = 0;; ++k) {
    c.rep.steps_checked = k;
    if (!wf(s)) return c.fail(k, "wf:CEK", "well-formed", cek::print(s)), c.rep;
    TermPtr u = cek::unload(s);
    if (!alpha_eq(u, t)) return c.fail(k, "SOS_CEK residual", print(t), print(u)), c.rep;
    auto rs = sos::step(u);
    auto rc = cek::step(s);
    Shape a = shape(rs), b = shape(rc);
    if (!same_shape(a, b, true)) return c.fail(k, "SOS_CEK", a.str(), b.str()), c.rep;
    if (auto sn = std::get_if<sos::Next>(&rs)) {
      auto depth = sos::redex_depth(u);
      // Frames above the redex: those already on the stack plus those the
      // descent pushes, less the one a prd, lambda or arithmetic rule eats.
      auto d = cek::descend(s).state;
      bool eats = d.code->is<Prd>() || d.code->is<Lam>() || d.code->is<Op>();
      auto above = d.kont.size() - (eats ? 1 : 0);
      if (!depth || *depth != above)
        return c.fail(k, "SOS_CEK redex depth", depth ? std::to_string(*depth) : "-", std::to_string(above)),
               c.rep;
      const auto& next = std::get<cek::Next>(rc).state;
      TermPtr un = cek::unload(next);
      if (!alpha_eq(sn->term, un)) return c.fail(k + 1, "SOS_CEK", print(sn->term), print(un)), c.rep;
      if (k == fuel) break;
      s = next;
      t = sn->term;
      continue;
    }
    if (auto ts = std::get_if<Terminal<Value>>(&rs)) {
      const auto& tc = std::get<Terminal<cek::CekVal>>(rc);
      std::optional<Value> vc;
      if (tc.value) vc = cek::unload_val(*tc.value);
      if (!same_value(ts->value, vc)) return c.fail(k, "SOS_CEK value", show(ts->value), show(vc)), c.rep;
      c.finish(observe_v(ts->value, ts->kind));
    } else {
      c.finish(sos::observe(std::get<Stuck>(rs)));
    }
    break;
  }
  return c.rep;
}

Report cek_peak(const TermPtr& m, std::size_t fuel) {
  Ctx c;
  c.rep.program = m;
  Program prog(m);
  peak::PeakState s = peak::load(prog);
  for (std::size_t k = 0;; ++k) {
    c.rep.steps_checked = k;
    if (auto w = peak::wf_check(prog, s); !w.ok) return c.fail(k, "wf:PEAK", "well-formed", wf_text(w)), c.rep;
    cek::CekState cs = peak::unload(prog, s);
    auto rc = cek::step(cs);
    auto rp = peak::step(prog, s);
    Shape a = shape(rc), b = shape(rp);
    if (!same_shape(a, b, false)) return c.fail(k, "CEK_PEAK", a.str(), b.str()), c.rep;
    if (auto cn = std::get_if<cek::Next>(&rc)) {
      const auto& next = std::get<peak::Next>(rp).state;
      TermPtr x = cek::unload(cn->state);
      TermPtr y = cek::unload(peak::unload(prog, next));
      if (!alpha_eq(x, y)) return c.fail(k + 1, "CEK_PEAK", print(x), print(y)), c.rep;
      if (k == fuel) break;
      s = next;
      continue;
    }
    if (auto tc = std::get_if<Terminal<cek::CekVal>>(&rc)) {
      const auto& tp = std::get<Terminal<PVal>>(rp);
      std::optional<Value> x, y;
      if (tc->value) x = cek::unload_val(*tc->value);
      if (tp.value) y = value_of(prog, *tp.value);
      if (!same_value(x, y)) return c.fail(k, "CEK_PEAK value", show(x), show(y)), c.rep;
      c.finish(observe_v(x, tc->kind));
    } else {
      c.finish(sos::observe(std::get<Stuck>(rc)));
    }
    break;
  }
  return c.rep;
}

std::string peak_line(const peak::PeakState& s) {
  std::string args;
  for (auto& a : s.args) args += (args.empty() ? "" : ", ") + a.str();
  return "pc=" + s.pc.str() + " env=" + print(s.env) + " args=[" + args + "] kont=" + std::to_string(s.kont.size());
}

Report peak_pek(const TermPtr& m, std::size_t fuel, Mode mode) {
  Ctx c;
  c.rep.program = m;
  Program prog(m);
  pek::PekState s = pek::load(prog);
  auto norm = [&](const peak::PeakState& x) { return mode == Mode::Strict ? x : peak::advance(prog, x); };
  for (std::size_t k = 0;; ++k) {
    c.rep.steps_checked = k;
    if (auto w = pek::wf_check(prog, s); !w.ok) return c.fail(k, "wf:PEK", "well-formed", wf_text(w)), c.rep;
    peak::PeakState ps = pek::unload(prog, s);
    if (auto w = peak::wf_check(prog, ps); !w.ok) return c.fail(k, "wf:PEAK", "well-formed", wf_text(w)), c.rep;
    auto ra = peak::step(prog, ps);
    auto rb = pek::step(prog, s);
    Shape a = shape(ra), b = shape(rb);
    if (!same_shape(a, b, false)) return c.fail(k, "PEAK_PEK", a.str(), b.str()), c.rep;
    if (auto an = std::get_if<peak::Next>(&ra)) {
      const auto& next = std::get<pek::Next>(rb).state;
      auto x = norm(an->state);
      auto y = norm(pek::unload(prog, next));
      if (!peak::same(x, y)) return c.fail(k + 1, "PEAK_PEK", peak_line(x), peak_line(y)), c.rep;
      if (k == fuel) break;
      s = next;
      continue;
    }
    if (auto ta = std::get_if<Terminal<PVal>>(&ra)) {
      const auto& tb = std::get<Terminal<PVal>>(rb);
      bool ok = ta->value.has_value() == tb.value.has_value() &&
                (!ta->value || cbpv::same(*ta->value, pek::unload_v(prog, *tb.value)));
      if (!ok)
        return c.fail(k, "PEAK_PEK value", ta->value ? print(*ta->value) : "-",
                      tb.value ? print(*tb.value) : "-"),
               c.rep;
      std::optional<Value> v;
      if (ta->value) v = value_of(prog, *ta->value);
      c.finish(observe_v(v, ta->kind));
    } else {
      c.finish(sos::observe(std::get<Stuck>(ra)));
    }
    break;
  }
  return c.rep;
}

std::string pek_line(const pek::PekState& s) {
  return "pc=" + s.pc.str() + " env=" + print(s.env) + " kont=" + std::to_string(s.kont.size());
}

Report pek_cfg(const TermPtr& m, std::size_t fuel, cfg::Mutation mut) {
  Ctx c;
  c.rep.program = m;
  Program prog(m);
  cfg::Cfg g = cfg::compile(prog, mut);
  pek::PekState s = pek::load(prog);
  if (s.pc != g.entry) return c.fail(0, "PEK_CFG entry", s.pc.str(), g.entry.str()), c.rep;
  for (std::size_t k = 0;; ++k) {
    c.rep.steps_checked = k;
    if (auto w = pek::wf_check(prog, s); !w.ok) return c.fail(k, "wf:CFG", "well-formed", wf_text(w)), c.rep;
    auto ra = pek::step(prog, s);
    auto rb = cfg::step(g, s, mut);
    Shape a = shape(ra), b = shape(rb);
    if (!same_shape(a, b, true)) return c.fail(k, "PEK_CFG", a.str(), b.str()), c.rep;
    if (auto an = std::get_if<pek::Next>(&ra)) {
      const auto& next = std::get<pek::Next>(rb).state;
      if (!pek::same(an->state, next)) return c.fail(k + 1, "PEK_CFG", pek_line(an->state), pek_line(next)), c.rep;
      if (k == fuel) break;
      s = next;
      continue;
    }
    if (auto ta = std::get_if<Terminal<PVal>>(&ra)) {
      const auto& tb = std::get<Terminal<PVal>>(rb);
      bool ok = ta->value.has_value() == tb.value.has_value() &&
                (!ta->value || cbpv::same(*ta->value, *tb.value));
      if (!ok)
        return c.fail(k, "PEK_CFG value", ta->value ? print(*ta->value) : "-", tb.value ? print(*tb.value) : "-"),
               c.rep;
      std::optional<Value> v;
      if (ta->value) v = value_of_pek(prog, *ta->value);
      c.finish(observe_v(v, ta->kind));
    } else {
      c.finish(sos::observe(std::get<Stuck>(ra)));
    }
    break;
  }
  return c.rep;
}

template <class F>
Report guarded(const TermPtr& m, const char* level, F f) {
  try {
    return f();
  } catch (const Error& e) {
    Report r;
    r.program = m;
    r.failure = Failure{0, level, "no error", std::string(cbpv::to_string(e.kind())) + ": " + e.what()};
    return r;
  }
}

}  // namespace

Report lockstep_check(const TermPtr& m, LevelPair pair, std::size_t fuel, Mode mode, cfg::Mutation mut) {
  return guarded(m, to_string(pair), [&] {
    switch (pair) {
      case LevelPair::SosCek: return sos_cek(m, fuel);
      case LevelPair::CekPeak: return cek_peak(m, fuel);
      case LevelPair::PeakPek: return peak_pek(m, fuel, mode);
      case LevelPair::PekCfg: return pek_cfg(m, fuel, mut);
    }
    return Report{};
  });
}

Report cfg_sos_check(const TermPtr& m, std::size_t fuel, cfg::Mutation mut) {
  return guarded(m, "CFG_SOS", [&] {
    Ctx c;
    c.rep.program = m;
    Program prog(m);
    cfg::Cfg g = cfg::compile(prog, mut);
    cfg::State s = pek::load(prog);
    s.pc = g.entry;
    for (std::size_t k = 0;; ++k) {
      c.rep.steps_checked = k;
      if (auto w = pek::wf_check(prog, s); !w.ok) return c.fail(k, "wf:CFG", "well-formed", wf_text(w)), c.rep;
      TermPtr u = cfg::unload(prog, s);
      auto rs = sos::step(u);
      auto rc = cfg::step(g, s, mut);
      Shape a = shape(rs), b = shape(rc);
      if (!same_shape(a, b, false)) return c.fail(k, "CFG_SOS", a.str(), b.str()), c.rep;
      if (auto sn = std::get_if<sos::Next>(&rs)) {
        const auto& next = std::get<pek::Next>(rc).state;
        TermPtr un = cfg::unload(prog, next);
        if (!alpha_eq(sn->term, un)) return c.fail(k + 1, "CFG_SOS", print(sn->term), print(un)), c.rep;
        if (k == fuel) break;
        s = next;
        continue;
      }
      if (auto ts = std::get_if<Terminal<Value>>(&rs)) {
        const auto& tc = std::get<Terminal<PVal>>(rc);
        std::optional<Value> v;
        if (tc.value) v = value_of_pek(prog, *tc.value);
        if (!same_value(ts->value, v)) return c.fail(k, "CFG_SOS value", show(ts->value), show(v)), c.rep;
        c.finish(observe_v(ts->value, ts->kind));
      } else {
        c.finish(sos::observe(std::get<Stuck>(rs)));
      }
      break;
    }
    return c.rep;
  });
}

Report roundtrip_check(const TermPtr& m) {
  return guarded(m, "ROUNDTRIP", [&] {
    Ctx c;
    c.rep.program = m;
    Program prog(m);
    auto check = [&](const char* level, const TermPtr& t) {
      if (!alpha_eq(t, m)) c.fail(0, level, print(m), print(t));
      return !c.rep.failure;
    };
    if (!check("CEK", cek::unload(cek::load(m)))) return c.rep;
    if (!check("PEAK", cek::unload(peak::unload(prog, peak::load(prog))))) return c.rep;
    if (!check("PEK", cfg::unload(prog, pek::load(prog)))) return c.rep;
    check("CFG", cfg::unload(prog, cfg::load(prog).second));
    return c.rep;
  });
}

Report path_check(const TermPtr& m, std::size_t fuel) {
  return guarded(m, "PATHS", [&] {
    Ctx c;
    c.rep.program = m;
    Program prog(m);
    cfg::Cfg g = cfg::compile(prog);
    auto known = cfg::paths_mentioned(g);
    known.insert(g.entry);
    cfg::State s = pek::load(prog);
    auto bad = [&](const Path& p) { return !known.count(p); };
    // Closures nest environments; visit each environment once.
    std::set<const void*> seen;
    std::function<std::optional<Path>(const PEnv&)> env_bad = [&](const PEnv& e) -> std::optional<Path> {
      if (!seen.insert(e.id()).second) return std::nullopt;
      for (auto& [k, v] : e.entries()) {
        if (bad(k)) return k;
        if (auto cl = std::get_if<PClosure>(&v.v)) {
          if (bad(cl->entry)) return cl->entry;
          if (auto r = env_bad(cl->env)) return r;
        }
      }
      return std::nullopt;
    };
    auto val_bad = [&](const PVal& v) -> std::optional<Path> {
      if (auto cl = std::get_if<PClosure>(&v.v)) {
        if (bad(cl->entry)) return cl->entry;
        return env_bad(cl->env);
      }
      return std::nullopt;
    };
    for (std::size_t k = 0; k <= fuel; ++k) {
      c.rep.steps_checked = k;
      std::optional<Path> hit;
      if (bad(s.pc)) hit = s.pc;
      if (!hit) hit = env_bad(s.env);
      for (auto& f : s.kont) {
        if (hit) break;
        if (auto a = std::get_if<pek::KArg>(&f.f)) {
          hit = val_bad(a->v);
        } else {
          const auto& r = std::get<pek::KRet>(f.f);
          if (bad(r.bind)) hit = r.bind;
          else if (bad(r.resume)) hit = r.resume;
          else hit = env_bad(r.env);
        }
      }
      if (hit) return c.fail(k, "PATHS", "paths from the graph", hit->str()), c.rep;
      auto r = cfg::step(g, s);
      auto n = std::get_if<pek::Next>(&r);
      if (!n) {
        c.rep.finished = true;
        break;
      }
      s = n->state;
    }
    return c.rep;
  });
}

Report stuck_alignment_check(const TermPtr& m, std::size_t fuel) {
  return guarded(m, "STUCK", [&] {
    Ctx c;
    c.rep.program = m;
    auto a = run_machine(Machine::Sos, m, fuel);
    auto b = run_machine(Machine::Cfg, m, fuel);
    c.rep.steps_checked = a.steps;
    bool sa = a.obs.kind == Observation::Kind::Stuck;
    bool sb = b.obs.kind == Observation::Kind::Stuck;
    if (a.steps != b.steps || sa != sb || !(a.obs == b.obs))
      return c.fail(a.steps, "STUCK", a.obs.str() + " after " + std::to_string(a.steps),
                    b.obs.str() + " after " + std::to_string(b.steps)),
             c.rep;
    if (sa && !alpha_eq(a.residual, b.residual))
      return c.fail(a.steps, "STUCK residual", print(a.residual), print(b.residual)), c.rep;
    if (a.obs.kind != Observation::Kind::OutOfFuel) c.finish(a.obs);
    return c.rep;
  });
}

// ---------------------------------------------------------------------------
// Term generator.
//
// Terms are generated against a small type discipline so most of them run
// somewhere interesting: value types are Num or U(C), computation types are
// F(A) or A -> C. ill_formed mode breaks the discipline on purpose.

namespace {

struct CT;
using CTP = std::shared_ptr<const CT>;
struct VT {
  CTP u;  // null for Num
};
struct CT {
  bool arrow;
  VT a;    // produced type, or argument type
  CTP res; // arrow only
};

bool eq(const VT& x, const VT& y);
bool eq(const CT& x, const CT& y) {
  if (x.arrow != y.arrow || !eq(x.a, y.a)) return false;
  return !x.arrow || eq(*x.res, *y.res);
}
bool eq(const VT& x, const VT& y) {
  if (!x.u || !y.u) return !x.u && !y.u;
  return eq(*x.u, *y.u);
}

const VT kNum{};

CTP producer(VT a) { return std::make_shared<const CT>(CT{false, std::move(a), nullptr}); }
CTP arrow(VT a, CTP r) { return std::make_shared<const CT>(CT{true, std::move(a), std::move(r)}); }

const char* const kPool[] = {"x", "y", "z", "f", "g", "a", "b"};
const char* const kFree[] = {"a", "b", "c"};

class Gen {
 public:
  Gen(std::uint64_t seed, const GenOptions& opt) : rng_(seed), opt_(opt), pending_(opt.plant) {}

  std::uint64_t pick(std::uint64_t n) { return rng_() % n; }
  bool chance(std::uint64_t num, std::uint64_t den) { return pick(den) < num; }

  VT rand_vt(int depth) {
    if (depth <= 0 || chance(7, 10)) return kNum;
    return VT{rand_ct(depth - 1)};
  }
  CTP rand_ct(int depth) {
    if (depth > 0 && chance(1, 3)) return arrow(rand_vt(depth - 1), rand_ct(depth - 1));
    return producer(rand_vt(depth));
  }
  CTP rand_arrow(int depth) { return arrow(rand_vt(depth), rand_ct(depth)); }

  std::string name() { return kPool[pick(7)]; }

  Value numeral() {
    switch (pick(10)) {
      case 0: return build::num(static_cast<std::int64_t>(pick(100)));
      case 1: return build::num(-static_cast<std::int64_t>(pick(5)) - 1);
      default: return build::num(static_cast<std::int64_t>(pick(4)));
    }
  }

  using Scope = std::vector<std::pair<std::string, VT>>;

  // Visible names of type t (shadowed entries skipped).
  std::vector<std::string> vars_of(const Scope& sc, const VT& t) {
    std::vector<std::string> out;
    for (std::size_t i = sc.size(); i-- > 0;) {
      bool shadowed = false;
      for (std::size_t j = i + 1; j < sc.size(); ++j) shadowed |= sc[j].first == sc[i].first;
      if (!shadowed && eq(sc[i].second, t)) out.push_back(sc[i].first);
    }
    return out;
  }

  Value junk_value(const Scope& sc, std::size_t budget) {
    if (!opt_.closed && chance(1, 3)) return build::var(kFree[pick(3)]);
    if (!sc.empty() && chance(1, 2)) return build::var(sc[pick(sc.size())].first);
    if (chance(1, 2)) return numeral();
    return build::thunk(comp(*rand_ct(1), budget / 2, sc));
  }

  Value value(const VT& t, std::size_t budget, const Scope& sc) {
    if (opt_.ill_formed && chance(1, 8)) return junk_value(sc, budget);
    auto vs = vars_of(sc, t);
    if (!vs.empty() && chance(1, 2)) return build::var(vs[pick(vs.size())]);
    if (!t.u && !opt_.closed && chance(1, 6)) return build::var(kFree[pick(3)]);
    if (!t.u) return numeral();
    return build::thunk(comp(*t.u, budget > 1 ? budget - 1 : 0, sc));
  }

  Value guard(const Scope& sc) {
    if (opt_.ill_formed && chance(1, 6)) return junk_value(sc, 2);
    auto vs = vars_of(sc, kNum);
    if (!vs.empty() && chance(1, 2)) return build::var(vs[pick(vs.size())]);
    return chance(1, 2) ? build::num(0) : numeral();
  }

  Scope with(Scope sc, std::string x, VT t) {
    sc.emplace_back(std::move(x), std::move(t));
    return sc;
  }

  std::pair<std::size_t, std::size_t> split(std::size_t b) {
    if (b < 2) return {0, 0};
    std::size_t l = pick(b);
    return {l, b - 1 - l};
  }

  TermPtr leaf(const CT& t, const Scope& sc) {
    if (t.arrow) {
      std::string x = name();
      return build::lam(x, leaf(*t.res, with(sc, x, t.a)));
    }
    auto fs = vars_of(sc, VT{std::make_shared<const CT>(t)});
    if (!fs.empty() && chance(1, 4)) return build::force(build::var(fs[pick(fs.size())]));
    if (!t.a.u && chance(1, 4))
      return build::op(value(kNum, 0, sc), static_cast<ArithOp>(pick(3)), value(kNum, 0, sc));
    return build::prd(value(t.a, 0, sc));
  }

  TermPtr comp(const CT& t, std::size_t budget, const Scope& sc) {
    if (pending_ && (budget <= 4 || chance(1, 4))) {
      RuleId r = *pending_;
      pending_.reset();
      return redex(r, t, budget, sc);
    }
    if (opt_.ill_formed && chance(1, 10)) return comp(*rand_ct(1), budget, sc);
    if (budget <= 1) return leaf(t, sc);
    auto [l, r] = split(budget);
    if (!t.arrow && budget >= 8 && chance(1, 6)) return loop(t, budget, sc);
    switch (pick(t.arrow ? 8 : 7)) {
      case 0: {
        VT a = rand_vt(1);
        std::string x = name();
        TermPtr left = comp(*producer(a), l, sc);
        return build::seq(left, x, comp(t, r, with(sc, x, a)));
      }
      case 1:
        return build::if0(guard(sc), comp(t, l, sc), comp(t, r, sc));
      case 2: {
        VT a = rand_vt(1);
        Value v = value(a, l, sc);
        return build::app(v, comp(*arrow(a, std::make_shared<const CT>(t)), r, sc));
      }
      case 3: {
        auto fs = vars_of(sc, VT{std::make_shared<const CT>(t)});
        if (!fs.empty() && chance(1, 2)) return build::force(build::var(fs[pick(fs.size())]));
        return build::force(build::thunk(comp(t, budget - 2, sc)));
      }
      case 4: {
        std::size_t n = chance(1, 3) ? 2 : 1;
        std::vector<std::pair<std::string, CTP>> names;
        // distinct names: in a bundle the leftmost duplicate wins, which
        // the scope bookkeeping here does not model
        while (names.size() < n) {
          auto x = name();
          if (names.empty() || names[0].first != x) names.push_back({x, rand_ct(1)});
        }
        Scope inner = sc;
        for (auto& [x, ct] : names) inner.emplace_back(x, VT{ct});
        std::vector<Def> defs;
        std::size_t each = l / n;
        for (auto& [x, ct] : names) defs.push_back({x, comp(*ct, each, inner)});
        return build::letrec(std::move(defs), comp(t, r, inner));
      }
      case 5:
        if (opt_.ill_formed && chance(1, 3))
          return build::app(junk_value(sc, l), comp(t, r, sc));  // possibly applying a non-function
        [[fallthrough]];
      case 6:
        if (budget > 6 && chance(2, 3)) return comp(t, budget, sc);
        return leaf(t, sc);
      default: {
        std::string x = name();
        return build::lam(x, comp(*t.res, budget - 1, with(sc, x, t.a)));
      }
    }
  }

  // letrec f = \n. if0 n { base } { n - 1 to m in body; m . force f } in k . force f
  TermPtr loop(const CT& t, std::size_t budget, const Scope& sc) {
    std::string f = name(), n = name(), m = name();
    while (n == f) n = name();
    while (m == f) m = name();
    VT ft{arrow(kNum, std::make_shared<const CT>(t))};
    Scope in_f = with(sc, f, ft);
    Scope in_n = with(in_f, n, kNum);
    std::size_t b = budget > 8 ? budget - 8 : 0;
    auto [l, r] = split(b);
    TermPtr again = build::app(build::var(m), build::force(build::var(f)));
    Scope in_m = with(in_n, m, kNum);
    if (r > 1) {
      std::string w = name();
      while (w == f || w == m) w = name();
      again = build::seq(comp(*producer(kNum), r, in_m), w, again);
    }
    TermPtr step = build::seq(build::op(build::var(n), ArithOp::Sub, build::num(1)), m, again);
    TermPtr body = build::lam(n, build::if0(build::var(n), comp(t, l, in_n), step));
    Value k = build::num(static_cast<std::int64_t>(pick(6)));
    return build::letrec({{f, body}}, build::app(k, build::force(build::var(f))));
  }

  TermPtr redex(RuleId r, const CT& t, std::size_t budget, const Scope& sc) {
    auto [l, rr] = split(budget);
    switch (r) {
      case RuleId::ForceThunk:
        return build::force(build::thunk(comp(t, budget > 2 ? budget - 2 : 0, sc)));
      case RuleId::Beta: {
        VT a = rand_vt(1);
        std::string x = name();
        Value v = value(a, l, sc);
        return build::app(v, build::lam(x, comp(t, rr, with(sc, x, a))));
      }
      case RuleId::Inline: {
        CTP ft = rand_arrow(1);
        std::string y = name();
        Value fn = build::thunk(build::lam(y, comp(*ft->res, l, with(sc, y, ft->a))));
        std::string f = name();
        return build::app(fn, build::lam(f, comp(t, rr, with(sc, f, VT{ft}))));
      }
      case RuleId::MoveElim: {
        if (!t.arrow && chance(1, 2)) {
          TermPtr left = comp(t, budget, sc);
          if (!producer_shaped(*left)) left = build::prd(value(t.a, 0, sc));
          std::string x = name();
          return build::seq(left, x, build::prd(build::var(x)));
        }
        VT a = rand_vt(1);
        std::string x = name();
        TermPtr left = build::prd(value(a, l, sc));
        return build::seq(left, x, comp(t, rr, with(sc, x, a)));
      }
      case RuleId::ConstFold: {
        std::string x = name();
        TermPtr left = build::op(numeral(), static_cast<ArithOp>(pick(3)), numeral());
        return build::seq(left, x, comp(t, budget, with(sc, x, kNum)));
      }
      case RuleId::DeadTrue:
        return build::if0(build::num(0), comp(t, l, sc), comp(t, rr, sc));
      case RuleId::DeadFalse:
        return build::if0(build::num(static_cast<std::int64_t>(pick(5)) + 1), comp(t, l, sc), comp(t, rr, sc));
      case RuleId::BranchElim: {
        TermPtr m = comp(t, budget, sc);
        auto vs = vars_of(sc, kNum);
        Value g = !vs.empty() && chance(1, 2) ? build::var(vs[pick(vs.size())]) : numeral();
        return build::if0(g, m, m);
      }
    }
    return leaf(t, sc);
  }

  std::optional<RuleId> pending() const { return pending_; }

 private:
  std::mt19937_64 rng_;
  GenOptions opt_;
  std::optional<RuleId> pending_;
};

}  // namespace

TermPtr gen_term(std::uint64_t seed, std::size_t size, const GenOptions& opt) {
  if (size == 0 && !opt.plant) return build::prd(Gen(seed, opt).numeral());
  std::size_t limit = std::max<std::size_t>(size, 2);
  for (std::uint64_t attempt = 0;; ++attempt) {
    Gen g(seed * 1000003u + attempt, opt);
    CTP root = g.chance(3, 4) ? producer(kNum) : g.rand_ct(1);
    std::size_t budget = size > 0 ? size - g.pick(size / 2 + 1) : 1;
    TermPtr m = g.comp(*root, budget, {});
    if (g.pending()) continue;  // generation ended before the plant fired
    bool fits = m->size <= limit || (opt.plant && attempt >= 64);
    if (fits || attempt >= 256) {
      if (!fits) m = build::prd(g.numeral());
      return m;
    }
  }
}

}  // namespace cbpv::harness
