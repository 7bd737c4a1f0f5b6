#include "cbpv/cek.hpp"

#include <optional>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace cbpv::cek {

CekState load(const TermPtr& m) { return {m, {}, {}}; }

namespace {

const Def* find_def(const LetRec& r, const std::string& x) {
  for (auto& d : r.defs)
    if (d.name == x) return &d;
  return nullptr;
}

}  // namespace

CekVal gamma(const Value& v, const CekEnv& env) {
  if (auto n = std::get_if<NumV>(&v)) return {NumC{n->n}};
  if (auto t = std::get_if<ThunkV>(&v)) return {Closure{t->body, env}};
  const std::string& x = std::get<VarV>(v).name;
  for (CekEnv e = env; !e.empty(); e = e.pop()) {
    const Frame& f = e.top();
    if (auto b = std::get_if<Bind>(&f.f)) {
      if (b->name == x) return b->value;
    } else {
      const auto& rf = std::get<RecFrame>(f.f);
      const auto& r = *rf.letrec->as<LetRec>();
      if (auto d = find_def(r, x)) return {Closure{build::letrec(r.defs, d->body), e}};
    }
  }
  return {SymVar{x}};
}

Descent descend(const CekState& s) {
  Descent d{s, 0};
  CekState& st = d.state;
  for (;;) {
    const Term& c = *st.code;
    if (auto a = c.as<App>()) {
      st.kont = st.kont.push({ArgF{gamma(a->arg, st.env)}});
      st.code = a->body;
      ++d.frames_pushed;
    } else if (auto q = c.as<Seq>()) {
      st.kont = st.kont.push({SeqF{q->binder, q->right, st.env}});
      st.code = q->left;
      ++d.frames_pushed;
    } else if (auto r = c.as<LetRec>()) {
      st.env = st.env.push({RecFrame{st.code}});
      st.code = r->body;
    } else {
      return d;
    }
  }
}

StepResult fire(const CekState& s) {
  const Term& c = *s.code;
  const KFrame* top = s.kont.empty() ? nullptr : &s.kont.top();
  auto resume = [&](const CekVal& v) -> StepResult {
    const auto& f = std::get<SeqF>(top->f);
    return Next{{f.rest, f.env.push({Bind{f.binder, v}}),
                 s.kont.pop()}};
  };

  if (auto fo = c.as<Force>()) {
    auto v = gamma(fo->v, s.env);
    if (auto cl = std::get_if<Closure>(&v.v)) return Next{{cl->code, cl->env, s.kont}};
    return Stuck{StuckReason::ForceNonThunk};
  }
  if (auto p = c.as<Prd>()) {
    auto v = gamma(p->v, s.env);
    if (!top) return Terminal<CekVal>{TerminalKind::ProducedValue, v};
    if (std::holds_alternative<ArgF>(top->f)) return Stuck{StuckReason::ApplyNonFunction};
    return resume(v);
  }
  if (auto l = c.as<Lam>()) {
    if (!top) return Terminal<CekVal>{TerminalKind::AwaitingArgument, std::nullopt};
    auto a = std::get_if<ArgF>(&top->f);
    if (!a) return Stuck{StuckReason::SequencedNonProducer};
    return Next{{l->body, s.env.push({Bind{l->binder, a->value}}), s.kont.pop()}};
  }
  if (auto i = c.as<If0>()) {
    auto g = gamma(i->guard, s.env);
    auto n = std::get_if<NumC>(&g.v);
    if (!n) return Stuck{StuckReason::GuardNotNumeral};
    return Next{{n->n == 0 ? i->then_branch : i->else_branch, s.env, s.kont}};
  }
  if (auto o = c.as<Op>()) {
    auto a = gamma(o->lhs, s.env), b = gamma(o->rhs, s.env);
    auto x = std::get_if<NumC>(&a.v), y = std::get_if<NumC>(&b.v);
    if (!x || !y) return Stuck{StuckReason::ArithNonNumeral};
    CekVal r{NumC{apply_arith(o->op, x->n, y->n)}};
    if (!top) return Terminal<CekVal>{TerminalKind::BareArith, r};
    if (std::holds_alternative<ArgF>(top->f)) return Stuck{StuckReason::ApplyNonFunction};
    return resume(r);
  }
  throw Error(ErrorKind::IllFormedState, "fire on an undescended state");
}

StepResult step(const CekState& s) { return fire(descend(s).state); }

// -------------------------------------------------------------- unload

namespace {

class Unloader {
 public:
  // Only the names free in the term being closed are looked up, so the
  // cost does not grow with the length of the environment.
  Subst subst(const CekEnv& env, const std::vector<std::string>& fv) {
    Subst s;
    for (const auto& x : fv)
      if (auto v = lookup(env, x)) s.emplace(x, *v);
    return s;
  }

  Value value(const CekVal& v) {
    if (auto x = std::get_if<SymVar>(&v.v)) return VarV{x->name};
    if (auto n = std::get_if<NumC>(&v.v)) return NumV{n->n};
    const auto& c = std::get<Closure>(v.v);
    return ThunkV{substitute(c.code, subst(c.env, c.code->fv))};
  }

 private:
  const Value* lookup(const CekEnv& env, const std::string& x) {
    auto key = std::make_pair(env.id(), x);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second ? &*it->second : nullptr;
    std::optional<Value> out;
    for (CekEnv e = env; !e.empty(); e = e.pop()) {
      const Frame& f = e.top();
      if (auto b = std::get_if<Bind>(&f.f)) {
        if (b->name != x) continue;
        out = value(b->value);
        break;
      }
      const auto& r = *std::get<RecFrame>(f.f).letrec->as<LetRec>();
      std::size_t j = 0;
      while (j < r.defs.size() && r.defs[j].name != x) ++j;
      if (j == r.defs.size()) continue;
      const auto& defs = closed_defs(e)->as<LetRec>()->defs;
      out = ThunkV{build::letrec(defs, defs[j].body)};
      break;
    }
    auto& slot = memo_.emplace(key, std::move(out)).first->second;
    return slot ? &*slot : nullptr;
  }

  // The letrec of the top RecFrame with its free names closed over.
  const TermPtr& closed_defs(const CekEnv& e) {
    if (auto it = closed_.find(e.id()); it != closed_.end()) return it->second;
    const auto& lr = std::get<RecFrame>(e.top().f).letrec;
    auto shell = build::letrec(lr->as<LetRec>()->defs, build::prd(NumV{0}));
    return closed_.emplace(e.id(), substitute(shell, subst(e.pop(), lr->fv))).first->second;
  }

  struct KeyHash {
    std::size_t operator()(const std::pair<const void*, std::string>& k) const {
      return std::hash<const void*>()(k.first) * 31 + std::hash<std::string>()(k.second);
    }
  };
  std::unordered_map<std::pair<const void*, std::string>, std::optional<Value>, KeyHash> memo_;
  std::unordered_map<const void*, TermPtr> closed_;
};

}  // namespace

TermPtr unload(const CekState& s) {
  Unloader u;
  TermPtr t = substitute(s.code, u.subst(s.env, s.code->fv));
  for (const auto& k : s.kont) {
    if (auto a = std::get_if<ArgF>(&k.f)) {
      t = build::app(u.value(a->value), t);
    } else {
      const auto& f = std::get<SeqF>(k.f);
      auto [x, rest] = substitute_under(f.binder, f.rest, u.subst(f.env, f.rest->fv));
      t = build::seq(t, x, rest);
    }
  }
  return t;
}

Value unload_val(const CekVal& v) {
  Unloader u;
  return u.value(v);
}

// ---------------------------------------------------------- well-formed

WfChecker::WfChecker(const std::vector<std::string>& free) : free_(free.begin(), free.end()) {}

bool WfChecker::env(const CekEnv& e) {
  if (e.empty()) return true;
  if (!seen_.insert(e.id()).second) return true;
  keep_.push_back(e);
  if (!env(e.pop())) return false;
  const Frame& f = e.top();
  if (auto b = std::get_if<Bind>(&f.f)) return value(b->value);
  return covered(std::get<RecFrame>(f.f).letrec->fv, bound(e.pop()), {});
}

bool WfChecker::value(const CekVal& v) {
  auto c = std::get_if<Closure>(&v.v);
  if (!c) return true;
  return env(c->env) && covered(c->code->fv, bound(c->env), {});
}

// Memoised per environment node; the name sets are small even when the
// environment is long.
const std::set<std::string>& WfChecker::bound(const CekEnv& e) {
  if (e.empty()) return none_;
  if (auto it = bound_.find(e.id()); it != bound_.end()) return it->second;
  std::set<std::string> out = bound(e.pop());
  const Frame& f = e.top();
  if (auto b = std::get_if<Bind>(&f.f)) out.insert(b->name);
  else
    for (auto& d : std::get<RecFrame>(f.f).letrec->as<LetRec>()->defs) out.insert(d.name);
  keep_.push_back(e);
  return bound_.emplace(e.id(), std::move(out)).first->second;
}

bool WfChecker::covered(const std::vector<std::string>& fv, const std::set<std::string>& names,
                        const std::string& extra) {
  for (auto& x : fv)
    if (x != extra && !names.count(x) && !free_.count(x)) return false;
  return true;
}

bool WfChecker::operator()(const CekState& s) {
  if (!env(s.env) || !covered(s.code->fv, bound(s.env), {})) return false;
  for (const auto& k : s.kont) {
    if (auto a = std::get_if<ArgF>(&k.f)) {
      if (!value(a->value)) return false;
    } else {
      const auto& f = std::get<SeqF>(k.f);
      if (!env(f.env) || !covered(f.rest->fv, bound(f.env), f.binder)) return false;
    }
  }
  return true;
}

bool wf_check(const CekState& s, const std::vector<std::string>& free_names) {
  return WfChecker(free_names)(s);
}

// --------------------------------------------------------------- compare

namespace {

bool same_env(const CekEnv& a, const CekEnv& b) {
  if (a.size() != b.size()) return false;
  auto i = a.begin(), j = b.begin();
  for (; i != a.end(); ++i, ++j) {
    if (i->f.index() != j->f.index()) return false;
    if (auto x = std::get_if<Bind>(&i->f)) {
      auto y = std::get_if<Bind>(&j->f);
      if (x->name != y->name || !same(x->value, y->value)) return false;
    } else if (!cbpv::same(*std::get<RecFrame>(i->f).letrec, *std::get<RecFrame>(j->f).letrec)) {
      return false;
    }
  }
  return true;
}

}  // namespace

bool same(const CekVal& a, const CekVal& b) {
  if (a.v.index() != b.v.index()) return false;
  if (auto x = std::get_if<SymVar>(&a.v)) return x->name == std::get<SymVar>(b.v).name;
  if (auto n = std::get_if<NumC>(&a.v)) return n->n == std::get<NumC>(b.v).n;
  const auto& c = std::get<Closure>(a.v);
  const auto& d = std::get<Closure>(b.v);
  return cbpv::same(*c.code, *d.code) && same_env(c.env, d.env);
}

bool same(const CekState& a, const CekState& b) {
  if (!cbpv::same(*a.code, *b.code) || !same_env(a.env, b.env)) return false;
  if (a.kont.size() != b.kont.size()) return false;
  auto i = a.kont.begin(), j = b.kont.begin();
  for (; i != a.kont.end(); ++i, ++j) {
    if (i->f.index() != j->f.index()) return false;
    if (auto x = std::get_if<ArgF>(&i->f)) {
      if (!same(x->value, std::get<ArgF>(j->f).value)) return false;
    } else {
      const auto& x2 = std::get<SeqF>(i->f);
      const auto& y2 = std::get<SeqF>(j->f);
      if (x2.binder != y2.binder || !cbpv::same(*x2.rest, *y2.rest) || !same_env(x2.env, y2.env))
        return false;
    }
  }
  return true;
}

namespace {

std::string print_env(const CekEnv& e) {
  std::string out = "[";
  bool first = true;
  for (const auto& f : e) {
    if (!first) out += ", ";
    first = false;
    if (auto b = std::get_if<Bind>(&f.f)) {
      out += b->name + "=" + print(b->value);
    } else {
      out += "rec{";
      bool f2 = true;
      for (auto& d : std::get<RecFrame>(f.f).letrec->as<LetRec>()->defs) {
        if (!f2) out += ",";
        f2 = false;
        out += d.name;
      }
      out += "}";
    }
  }
  return out + "]";
}

}  // namespace

std::string print(const CekVal& v) {
  if (auto x = std::get_if<SymVar>(&v.v)) return "sym " + x->name;
  if (auto n = std::get_if<NumC>(&v.v)) return std::to_string(n->n);
  const auto& c = std::get<Closure>(v.v);
  return "clo(" + cbpv::print(*c.code) + ", " + print_env(c.env) + ")";
}

std::string print(const CekState& s) {
  std::string out = "<" + cbpv::print(*s.code) + " | " + print_env(s.env) + " | ";
  bool first = true;
  for (const auto& k : s.kont) {
    if (!first) out += " :: ";
    first = false;
    if (auto a = std::get_if<ArgF>(&k.f)) out += "ARG " + print(a->value);
    else out += "SEQ " + std::get<SeqF>(k.f).binder;
  }
  if (first) out += ".";
  return out + ">";
}

std::string trace_line(std::size_t i, const CekState& s) {
  static const char* heads[] = {"force", "prd", "app", "lam", "seq", "letrec", "if0", "op"};
  return "cek " + std::to_string(i) + ": code=" + heads[s.code->node.index()] +
         " env=" + std::to_string(s.env.size()) + " kont=" + std::to_string(s.kont.size());
}

}  // namespace cbpv::cek
