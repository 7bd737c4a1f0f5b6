#include "cbpv/peak.hpp"

#include <map>
#include <unordered_set>

namespace cbpv::peak {

PeakState load(const Program&) { return {Path{}, PEnv{}, Args{}, Kont{}}; }

PVal lookup_var(const Program& prog, const Path& p, const PEnv& e) {
  const BinderRef& b = prog.binder(p);
  if (auto r = std::get_if<RecBind>(&b)) return {PClosure{r->at.child(r->index), e}};
  if (auto f = std::get_if<FreeVar>(&b)) return {SymVar{f->name}};
  const Path& q = std::holds_alternative<LamBind>(b) ? std::get<LamBind>(b).at
                                                     : std::get<SeqBind>(b).at;
  if (auto v = e.find(q)) return *v;
  throw Error(ErrorKind::MissingBinding, "no value for binder " + q.str());
}

PVal gamma(const Program& prog, const Path& p, const PEnv& e) {
  const Value& v = prog.value(p);
  if (auto n = std::get_if<NumV>(&v)) return {NumP{n->n}};
  if (std::holds_alternative<ThunkV>(v)) return {PClosure{p.child(0), e}};
  return lookup_var(prog, p, e);
}

std::vector<KFrame> delta(const Program& prog, const PEnv& e, const Args& a) {
  std::vector<KFrame> out;
  for (Args rest = a; !rest.empty(); rest = rest.pop()) {
    const AFrame& f = rest.top();
    if (f.kind == AFrame::Kind::Seq) {
      out.push_back({KSeq{f.at, e, rest.pop()}});
      break;
    }
    out.push_back({KArg{gamma(prog, f.at.child(0), e)}});
  }
  return out;
}

PeakState advance(const Program& prog, const PeakState& s) {
  PeakState r = s;
  for (;;) {
    const Term& t = prog.computation(r.pc);
    if (t.is<Seq>()) {
      r.args = r.args.push({AFrame::Kind::Seq, r.pc});
      r.pc = r.pc.child(0);
    } else if (t.is<App>()) {
      r.args = r.args.push({AFrame::Kind::Arg, r.pc});
      r.pc = r.pc.child(1);
    } else if (t.is<LetRec>()) {
      r.pc = r.pc.child(0);
    } else {
      return r;
    }
  }
}

namespace {

Kont prepend(const std::vector<KFrame>& top_first, Kont k) {
  for (auto it = top_first.rbegin(); it != top_first.rend(); ++it) k = k.push(*it);
  return k;
}

// Deliver a produced value to the nearest SEQ frame, static or saved.
StepResult produce(const PeakState& s, PVal v, TerminalKind kind) {
  if (!s.args.empty()) {
    const AFrame& f = s.args.top();
    return Next{{f.at.child(1), s.env.set(f.at, std::move(v)), s.args.pop(), s.kont}};
  }
  if (s.kont.empty()) return Terminal<PVal>{kind, std::move(v)};
  if (auto k = std::get_if<KSeq>(&s.kont.top().f))
    return Next{{k->at.child(1), k->env.set(k->at, std::move(v)), k->args, s.kont.pop()}};
  return Stuck{StuckReason::ApplyNonFunction};
}

bool arg_on_top(const PeakState& s) {
  return !s.args.empty() && s.args.top().kind == AFrame::Kind::Arg;
}

StepResult fire_unchecked(const Program& prog, const PeakState& s) {
  const Term& t = prog.computation(s.pc);
  const Path& pc = s.pc;

  if (t.is<Force>()) {
    PVal f = gamma(prog, pc.child(0), s.env);
    auto c = std::get_if<PClosure>(&f.v);
    if (!c) return Stuck{StuckReason::ForceNonThunk};
    return Next{{c->entry, c->env, Args{}, prepend(delta(prog, s.env, s.args), s.kont)}};
  }
  if (t.is<Prd>()) {
    if (arg_on_top(s)) return Stuck{StuckReason::ApplyNonFunction};
    return produce(s, gamma(prog, pc.child(0), s.env), TerminalKind::ProducedValue);
  }
  if (t.is<Lam>()) {
    if (arg_on_top(s)) {
      const AFrame& f = s.args.top();
      return Next{{pc.child(0), s.env.set(pc, gamma(prog, f.at.child(0), s.env)), s.args.pop(),
                   s.kont}};
    }
    if (!s.args.empty()) return Stuck{StuckReason::SequencedNonProducer};
    if (s.kont.empty()) return Terminal<PVal>{TerminalKind::AwaitingArgument, std::nullopt};
    auto k = std::get_if<KArg>(&s.kont.top().f);
    if (!k) return Stuck{StuckReason::SequencedNonProducer};
    return Next{{pc.child(0), s.env.set(pc, k->v), Args{}, s.kont.pop()}};
  }
  if (t.is<If0>()) {
    PVal g = gamma(prog, pc.child(0), s.env);
    auto n = std::get_if<NumP>(&g.v);
    if (!n) return Stuck{StuckReason::GuardNotNumeral};
    return Next{{pc.child(n->n == 0 ? 1 : 2), s.env, s.args, s.kont}};
  }
  auto o = t.as<Op>();
  if (!o) throw Error(ErrorKind::IllFormedState, "fire at a search node " + pc.str());
  if (arg_on_top(s)) return Stuck{StuckReason::ApplyNonFunction};
  PVal a = gamma(prog, pc.child(0), s.env), b = gamma(prog, pc.child(1), s.env);
  auto x = std::get_if<NumP>(&a.v), y = std::get_if<NumP>(&b.v);
  if (!x || !y) return Stuck{StuckReason::ArithNonNumeral};
  return produce(s, {NumP{apply_arith(o->op, x->n, y->n)}}, TerminalKind::BareArith);
}

}  // namespace

StepResult fire(const Program& prog, const PeakState& s) {
  try {
    return fire_unchecked(prog, s);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::MissingBinding) return Stuck{StuckReason::UnboundPath};
    throw;
  }
}

StepResult step(const Program& prog, const PeakState& s) { return fire(prog, advance(prog, s)); }

// -------------------------------------------------------------- unload

namespace {

TermPtr node_ptr(const Program& prog, const Term* t) { return TermPtr(prog.root(), t); }

class Unloader {
 public:
  explicit Unloader(const Program& prog) : prog_(prog) {}

  cek::CekEnv env(const Path& p, const PEnv& e) {
    auto key = std::make_pair(p, e.id());
    auto it = envs_.find(key);
    if (it != envs_.end()) return it->second;
    cek::CekEnv out;
    NodeRef cur = &*prog_.root();
    Path here;
    for (auto n : p.indices()) {
      if (auto t = std::get_if<const Term*>(&cur)) {
        const Term& node = **t;
        if (auto l = node.as<Lam>(); l && n == 0) {
          out = out.push({cek::Bind{l->binder, bound(here, e)}});
        } else if (auto s = node.as<Seq>(); s && n == 1) {
          out = out.push({cek::Bind{s->binder, bound(here, e)}});
        } else if (node.is<LetRec>()) {
          out = out.push({cek::RecFrame{node_ptr(prog_, &node)}});
        }
      }
      here = here.child(n);
      cur = child_node(cur, n);
    }
    envs_.emplace(key, out);
    return out;
  }

  cek::CekVal value(const PVal& v) {
    if (auto x = std::get_if<SymVar>(&v.v)) return {cek::SymVar{x->name}};
    if (auto n = std::get_if<NumP>(&v.v)) return {cek::NumC{n->n}};
    const auto& c = std::get<PClosure>(v.v);
    return {cek::Closure{code(c.entry), env(c.entry, c.env)}};
  }

  // Entry code; a letrec definition is re-wrapped in its bundle.
  TermPtr code(const Path& p) {
    if (auto q = letrec_def_parent(prog_, p)) {
      const auto& r = *prog_.computation(*q).as<LetRec>();
      return build::letrec(r.defs, r.defs[p.last() - 1].body);
    }
    return node_ptr(prog_, &prog_.computation(p));
  }

  void kont(const PEnv& e, const Args& args, const Kont& k, std::vector<cek::KFrame>& out) {
    PEnv cur_env = e;
    Args cur_args = args;
    Kont rest = k;
    for (;;) {
      for (const AFrame& f : cur_args) {
        if (f.kind == AFrame::Kind::Arg) {
          out.push_back({cek::ArgF{value(gamma(prog_, f.at.child(0), cur_env))}});
        } else {
          out.push_back({seq_frame(f.at, cur_env)});
        }
      }
      if (rest.empty()) return;
      const KFrame& top = rest.top();
      if (auto a = std::get_if<KArg>(&top.f)) {
        out.push_back({cek::ArgF{value(a->v)}});
        cur_args = Args{};
      } else {
        const auto& s = std::get<KSeq>(top.f);
        out.push_back({seq_frame(s.at, s.env)});
        cur_env = s.env;
        cur_args = s.args;
      }
      rest = rest.pop();
    }
  }

 private:
  const Program& prog_;
  std::map<std::pair<Path, const void*>, cek::CekEnv> envs_;

  cek::CekVal bound(const Path& q, const PEnv& e) {
    auto v = e.find(q);
    if (!v) throw Error(ErrorKind::IllFormedState, "no value for binder " + q.str());
    return value(*v);
  }

  cek::SeqF seq_frame(const Path& q, const PEnv& e) {
    const Term& s = prog_.computation(q);
    auto seq = s.as<Seq>();
    if (!seq) throw Error(ErrorKind::IllFormedState, "SEQ frame at a non-Seq node " + q.str());
    return {seq->binder, seq->right, env(q, e)};
  }
};

}  // namespace

cek::CekState unload(const Program& prog, const PeakState& s) {
  Unloader u(prog);
  std::vector<cek::KFrame> frames;
  try {
    u.kont(s.env, s.args, s.kont, frames);
    return {u.code(s.pc), u.env(s.pc, s.env), cek::CekKont::from_top_first(frames)};
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::MissingBinding || e.kind() == ErrorKind::InvalidPath ||
        e.kind() == ErrorKind::NotAComputation || e.kind() == ErrorKind::NotAValue)
      throw Error(ErrorKind::IllFormedState, e.what());
    throw;
  }
}

cek::CekVal unload_v(const Program& prog, const PVal& v) { return Unloader(prog).value(v); }

cek::CekEnv unload_e(const Program& prog, const Path& p, const PEnv& e) {
  return Unloader(prog).env(p, e);
}

// ------------------------------------------------------------ wf check

std::vector<Path> missing_binders(const Program& prog, const Path& p, const PEnv& e) {
  std::vector<Path> out;
  for (auto& q : scope_binders(prog, p))
    if (!e.find(q)) out.push_back(q);
  return out;
}

namespace {

class Checker {
 public:
  Checker(const Program& prog, WfReport& rep) : prog_(prog), rep_(rep) {}

  void wf1(const Path& p, const PEnv& e, const char* what) {
    try {
      for (auto& q : missing_binders(prog_, p, e))
        fail(std::string(what) + " " + p.str() + ": binder " + q.str() + " unbound");
    } catch (const Error& err) {
      fail(std::string(what) + " " + p.str() + ": " + err.what());
    }
    env(e);
  }

  void env(const PEnv& e) {
    if (!seen_.insert(e.id()).second) return;
    for (auto& [_, v] : e.entries()) value(v);
  }

  void value(const PVal& v) {
    if (auto c = std::get_if<PClosure>(&v.v)) wf1(c->entry, c->env, "closure");
  }

  void args(const Path& p, const Args& a) {
    Path prev = p;
    for (const AFrame& f : a) {
      if (!f.at.encloses(prev)) fail("frame " + f.str() + " does not enclose " + prev.str());
      try {
        const Term& t = prog_.computation(f.at);
        bool ok = f.kind == AFrame::Kind::Arg ? t.is<App>() : t.is<Seq>();
        if (!ok) fail("frame " + f.str() + " at wrong node kind");
      } catch (const Error& err) {
        fail("frame " + f.str() + ": " + err.what());
      }
      prev = f.at;
    }
  }

  void fail(std::string msg) {
    rep_.ok = false;
    rep_.violations.push_back(std::move(msg));
  }

 private:
  const Program& prog_;
  WfReport& rep_;
  std::unordered_set<const void*> seen_;
};

}  // namespace

WfReport wf_check(const Program& prog, const PeakState& s) {
  WfReport rep;
  Checker c(prog, rep);
  c.wf1(s.pc, s.env, "pc");
  c.args(s.pc, s.args);
  for (const KFrame& k : s.kont) {
    if (auto a = std::get_if<KArg>(&k.f)) {
      c.value(a->v);
    } else {
      const auto& q = std::get<KSeq>(k.f);
      c.wf1(q.at, q.env, "kseq");
      c.args(q.at, q.args);
    }
  }
  return rep;
}

bool same(const PeakState& a, const PeakState& b) {
  if (a.pc != b.pc || !cbpv::same(a.env, b.env)) return false;
  if (a.args.to_vector() != b.args.to_vector() || a.kont.size() != b.kont.size()) return false;
  auto i = a.kont.begin(), j = b.kont.begin();
  for (; i != a.kont.end(); ++i, ++j) {
    if (i->f.index() != j->f.index()) return false;
    if (auto x = std::get_if<KArg>(&i->f)) {
      if (!cbpv::same(x->v, std::get<KArg>(j->f).v)) return false;
    } else {
      const auto& x2 = std::get<KSeq>(i->f);
      const auto& y2 = std::get<KSeq>(j->f);
      if (x2.at != y2.at || !cbpv::same(x2.env, y2.env) ||
          x2.args.to_vector() != y2.args.to_vector())
        return false;
    }
  }
  return true;
}

std::string trace_line(std::size_t i, const PeakState& s) {
  std::string args = "[";
  bool first = true;
  for (const AFrame& f : s.args) {
    if (!first) args += ", ";
    first = false;
    args += f.str();
  }
  args += "]";
  return "peak " + std::to_string(i) + ": pc=" + s.pc.str() + " env=" +
         std::to_string(s.env.size()) + " args=" + args + " kont=" + std::to_string(s.kont.size());
}

}  // namespace cbpv::peak
