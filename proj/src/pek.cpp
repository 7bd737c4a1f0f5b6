#include "cbpv/pek.hpp"

#include <unordered_map>
#include <unordered_set>

namespace cbpv::pek {

PekState load(const Program& prog) { return {eta(prog, Path{}), PEnv{}, Kont{}}; }

PVal gamma(const Program& prog, const Path& p, const PEnv& e) {
  const Value& v = prog.value(p);
  if (auto n = std::get_if<NumV>(&v)) return {NumP{n->n}};
  if (std::holds_alternative<ThunkV>(v)) return {PClosure{eta(prog, p.child(0)), e}};
  const BinderRef& b = prog.binder(p);
  if (auto r = std::get_if<RecBind>(&b)) return {PClosure{eta(prog, r->at.child(r->index)), e}};
  return peak::lookup_var(prog, p, e);
}

std::vector<KFrame> delta(const Program& prog, const PEnv& e, const std::vector<AFrame>& a) {
  std::vector<KFrame> out;
  for (const AFrame& f : a) {
    if (f.kind == AFrame::Kind::Seq) {
      out.push_back({KRet{f.at, eta(prog, f.at.child(1)), e}});
      break;
    }
    out.push_back({KArg{gamma(prog, f.at.child(0), e)}});
  }
  return out;
}

namespace {

StepResult produce(const Program& prog, const PekState& s, const std::vector<AFrame>& a, PVal v,
                   TerminalKind kind) {
  if (!a.empty()) {
    const Path& q = a.front().at;
    return Next{{eta(prog, q.child(1)), s.env.set(q, std::move(v)), s.kont}};
  }
  if (s.kont.empty()) return Terminal<PVal>{kind, std::move(v)};
  if (auto k = std::get_if<KRet>(&s.kont.top().f))
    return Next{{k->resume, k->env.set(k->bind, std::move(v)), s.kont.pop()}};
  return Stuck{StuckReason::ApplyNonFunction};
}

StepResult step_unchecked(const Program& prog, const PekState& s) {
  const Path& pc = s.pc;
  const Term& t = prog.computation(pc);
  auto a = aframes(prog, pc);
  bool arg_head = !a.empty() && a.front().kind == AFrame::Kind::Arg;

  if (t.is<Force>()) {
    PVal f = gamma(prog, pc.child(0), s.env);
    auto c = std::get_if<PClosure>(&f.v);
    if (!c) return Stuck{StuckReason::ForceNonThunk};
    auto frames = delta(prog, s.env, a);
    Kont k = s.kont;
    for (auto it = frames.rbegin(); it != frames.rend(); ++it) k = k.push(*it);
    return Next{{c->entry, c->env, k}};
  }
  if (t.is<Prd>()) {
    if (arg_head) return Stuck{StuckReason::ApplyNonFunction};
    return produce(prog, s, a, gamma(prog, pc.child(0), s.env), TerminalKind::ProducedValue);
  }
  if (t.is<Lam>()) {
    Path body = eta(prog, pc.child(0));
    if (arg_head) return Next{{body, s.env.set(pc, gamma(prog, a.front().at.child(0), s.env)), s.kont}};
    if (!a.empty()) return Stuck{StuckReason::SequencedNonProducer};
    if (s.kont.empty()) return Terminal<PVal>{TerminalKind::AwaitingArgument, std::nullopt};
    auto k = std::get_if<KArg>(&s.kont.top().f);
    if (!k) return Stuck{StuckReason::SequencedNonProducer};
    return Next{{body, s.env.set(pc, k->v), s.kont.pop()}};
  }
  if (t.is<If0>()) {
    PVal g = gamma(prog, pc.child(0), s.env);
    auto n = std::get_if<NumP>(&g.v);
    if (!n) return Stuck{StuckReason::GuardNotNumeral};
    return Next{{eta(prog, pc.child(n->n == 0 ? 1 : 2)), s.env, s.kont}};
  }
  auto o = t.as<Op>();
  if (!o) throw Error(ErrorKind::IllFormedState, "pc at a search node " + pc.str());
  if (arg_head) return Stuck{StuckReason::ApplyNonFunction};
  PVal x = gamma(prog, pc.child(0), s.env), y = gamma(prog, pc.child(1), s.env);
  auto nx = std::get_if<NumP>(&x.v), ny = std::get_if<NumP>(&y.v);
  if (!nx || !ny) return Stuck{StuckReason::ArithNonNumeral};
  return produce(prog, s, a, {NumP{apply_arith(o->op, nx->n, ny->n)}}, TerminalKind::BareArith);
}

}  // namespace

StepResult step(const Program& prog, const PekState& s) {
  try {
    return step_unchecked(prog, s);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::MissingBinding) return Stuck{StuckReason::UnboundPath};
    throw;
  }
}

// -------------------------------------------------------------- unload

namespace {

class Rooter {
 public:
  explicit Rooter(const Program& prog) : prog_(prog) {}

  PEnv env(const PEnv& e) {
    auto it = memo_.find(e.id());
    if (it != memo_.end()) return it->second;
    PEnv out;
    for (auto& [k, v] : e.entries()) out = out.set(k, value(v));
    memo_.emplace(e.id(), out);
    return out;
  }

  PVal value(const PVal& v) {
    auto c = std::get_if<PClosure>(&v.v);
    if (!c) return v;
    return {PClosure{spine_root(prog_, c->entry), env(c->env)}};
  }

 private:
  const Program& prog_;
  std::unordered_map<const void*, PEnv> memo_;
};

}  // namespace

peak::PeakState unload(const Program& prog, const PekState& s) {
  Rooter r(prog);
  std::vector<peak::KFrame> frames;
  for (const KFrame& k : s.kont) {
    if (auto a = std::get_if<KArg>(&k.f)) {
      frames.push_back({peak::KArg{r.value(a->v)}});
    } else {
      const auto& ret = std::get<KRet>(k.f);
      auto saved = aframes(prog, ret.bind);
      frames.push_back({peak::KSeq{ret.bind, r.env(ret.env), peak::Args::from_top_first(saved)}});
    }
  }
  Path root = spine_root(prog, s.pc);
  return {root, r.env(s.env), peak::Args::from_top_first(aframes(prog, root)),
          peak::Kont::from_top_first(frames)};
}

PVal unload_v(const Program& prog, const PVal& v) { return Rooter(prog).value(v); }

// ------------------------------------------------------------ wf check

namespace {

class Checker {
 public:
  Checker(const Program& prog, peak::WfReport& rep) : prog_(prog), rep_(rep) {}

  void position(const Path& p, const PEnv& e, const char* what) {
    try {
      if (!is_instruction(prog_.computation(p)))
        fail(std::string(what) + " " + p.str() + " is not an instruction position");
      for (auto& q : peak::missing_binders(prog_, p, e))
        fail(std::string(what) + " " + p.str() + ": binder " + q.str() + " unbound");
    } catch (const Error& err) {
      fail(std::string(what) + " " + p.str() + ": " + err.what());
    }
    env(e);
  }

  void ret(const KRet& k) {
    try {
      if (!prog_.computation(k.bind).is<Seq>()) fail("return frame bind " + k.bind.str() + " is not a Seq");
      else if (k.resume != eta(prog_, k.bind.child(1)))
        fail("return frame resume " + k.resume.str() + " is not eta(1::" + k.bind.str() + ")");
      for (auto& q : peak::missing_binders(prog_, k.bind, k.env))
        fail("return frame " + k.bind.str() + ": binder " + q.str() + " unbound");
    } catch (const Error& err) {
      fail("return frame " + k.bind.str() + ": " + err.what());
    }
    env(k.env);
  }

  void env(const PEnv& e) {
    if (!seen_.insert(e.id()).second) return;
    for (auto& [_, v] : e.entries()) value(v);
  }

  void value(const PVal& v) {
    if (auto c = std::get_if<PClosure>(&v.v)) position(c->entry, c->env, "closure");
  }

 private:
  const Program& prog_;
  peak::WfReport& rep_;
  std::unordered_set<const void*> seen_;

  void fail(std::string msg) {
    rep_.ok = false;
    rep_.violations.push_back(std::move(msg));
  }
};

}  // namespace

peak::WfReport wf_check(const Program& prog, const PekState& s) {
  peak::WfReport rep;
  Checker c(prog, rep);
  c.position(s.pc, s.env, "pc");
  for (const KFrame& k : s.kont) {
    if (auto a = std::get_if<KArg>(&k.f)) c.value(a->v);
    else c.ret(std::get<KRet>(k.f));
  }
  return rep;
}

bool same(const PekState& a, const PekState& b) {
  if (a.pc != b.pc || !cbpv::same(a.env, b.env) || a.kont.size() != b.kont.size()) return false;
  auto i = a.kont.begin(), j = b.kont.begin();
  for (; i != a.kont.end(); ++i, ++j) {
    if (i->f.index() != j->f.index()) return false;
    if (auto x = std::get_if<KArg>(&i->f)) {
      if (!cbpv::same(x->v, std::get<KArg>(j->f).v)) return false;
    } else {
      const auto& x2 = std::get<KRet>(i->f);
      const auto& y2 = std::get<KRet>(j->f);
      if (x2.bind != y2.bind || x2.resume != y2.resume || !cbpv::same(x2.env, y2.env)) return false;
    }
  }
  return true;
}

std::string trace_line(std::size_t i, const PekState& s) {
  return "pek " + std::to_string(i) + ": pc=" + s.pc.str() + " env=" + std::to_string(s.env.size()) +
         " kont=" + std::to_string(s.kont.size());
}

}  // namespace cbpv::pek
