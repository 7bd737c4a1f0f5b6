#include "cbpv/sos.hpp"

namespace cbpv {

const char* to_string(TerminalKind k) {
  switch (k) {
    case TerminalKind::ProducedValue: return "ProducedValue";
    case TerminalKind::AwaitingArgument: return "AwaitingArgument";
    case TerminalKind::BareArith: return "BareArith";
  }
  return "?";
}

const char* to_string(StuckReason r) {
  switch (r) {
    case StuckReason::ForceNonThunk: return "ForceNonThunk";
    case StuckReason::GuardNotNumeral: return "GuardNotNumeral";
    case StuckReason::ApplyNonFunction: return "ApplyNonFunction";
    case StuckReason::SequencedNonProducer: return "SequencedNonProducer";
    case StuckReason::ArithNonNumeral: return "ArithNonNumeral";
    case StuckReason::UnboundPath: return "UnboundPath";
  }
  return "?";
}

const char* to_string(Equivalence e) {
  switch (e) {
    case Equivalence::Equivalent: return "Equivalent";
    case Equivalence::Inequivalent: return "Inequivalent";
    case Equivalence::Unknown: return "Unknown";
  }
  return "?";
}

std::string Observation::str() const {
  switch (kind) {
    case Kind::Number: return std::to_string(number);
    case Kind::Symbol: return symbol;
    case Kind::Thunk: return "<thunk>";
    case Kind::Awaiting: return "<awaiting argument>";
    case Kind::Stuck: return std::string("<stuck: ") + to_string(reason) + ">";
    case Kind::OutOfFuel: return "<fuel exhausted>";
  }
  return "?";
}

}  // namespace cbpv

namespace cbpv::sos {

namespace {

// An evaluation-context frame: V . [] or [] to x in M.
struct Frame {
  bool is_arg;
  Value arg;
  std::string binder;
  TermPtr rest;
};

struct Focus {
  std::vector<Frame> frames;  // outermost first
  TermPtr redex;
};

TermPtr unroll(const LetRec& r, const TermPtr& body) {
  Subst s;
  for (std::size_t j = r.defs.size(); j-- > 0;)
    s[r.defs[j].name] = build::thunk(build::letrec(r.defs, r.defs[j].body));
  return substitute(body, s);
}

}  // namespace

TermPtr unroll(const TermPtr& m) {
  TermPtr cur = m;
  while (auto r = cur->as<LetRec>()) cur = unroll(*r, r->body);
  return cur;
}

namespace {

Focus decompose(const TermPtr& m) {
  Focus f;
  TermPtr cur = m;
  for (;;) {
    if (auto a = cur->as<App>()) {
      f.frames.push_back({true, a->arg, {}, nullptr});
      cur = a->body;
    } else if (auto s = cur->as<Seq>()) {
      f.frames.push_back({false, NumV{0}, s->binder, s->right});
      cur = s->left;
    } else if (auto r = cur->as<LetRec>()) {
      cur = unroll(*r, r->body);
    } else {
      break;
    }
  }
  f.redex = cur;
  return f;
}

TermPtr plug(const std::vector<Frame>& frames, std::size_t count, TermPtr hole) {
  for (std::size_t i = count; i-- > 0;) {
    const Frame& fr = frames[i];
    hole = fr.is_arg ? build::app(fr.arg, hole) : build::seq(hole, fr.binder, fr.rest);
  }
  return hole;
}

TermPtr bind_value(const std::string& x, const Value& v, const TermPtr& m) {
  return substitute(m, Subst{{x, v}});
}

struct Fired {
  StepResult result;
  bool reduced;
};

Fired fire(const Focus& f) {
  const auto& fr = f.frames;
  std::size_t n = fr.size();
  const Frame* top = n ? &fr.back() : nullptr;
  auto next = [&](TermPtr t) { return Fired{Next{std::move(t)}, true}; };
  auto stuck = [](StuckReason r) { return Fired{Stuck{r}, false}; };
  const Term& r = *f.redex;

  if (auto fo = r.as<Force>()) {
    if (auto t = std::get_if<ThunkV>(&fo->v)) return next(plug(fr, n, t->body));
    return stuck(StuckReason::ForceNonThunk);
  }
  if (auto p = r.as<Prd>()) {
    if (!top) return {Terminal<Value>{TerminalKind::ProducedValue, p->v}, false};
    if (top->is_arg) return stuck(StuckReason::ApplyNonFunction);
    return next(plug(fr, n - 1, bind_value(top->binder, p->v, top->rest)));
  }
  if (auto l = r.as<Lam>()) {
    if (!top) return {Terminal<Value>{TerminalKind::AwaitingArgument, std::nullopt}, false};
    if (!top->is_arg) return stuck(StuckReason::SequencedNonProducer);
    return next(plug(fr, n - 1, bind_value(l->binder, top->arg, l->body)));
  }
  if (auto i = r.as<If0>()) {
    auto g = std::get_if<NumV>(&i->guard);
    if (!g) return stuck(StuckReason::GuardNotNumeral);
    return next(plug(fr, n, g->n == 0 ? i->then_branch : i->else_branch));
  }
  auto o = r.as<Op>();
  auto a = std::get_if<NumV>(&o->lhs);
  auto b = std::get_if<NumV>(&o->rhs);
  if (!a || !b) return stuck(StuckReason::ArithNonNumeral);
  std::int64_t v = apply_arith(o->op, a->n, b->n);
  if (!top) return {Terminal<Value>{TerminalKind::BareArith, NumV{v}}, false};
  if (top->is_arg) return stuck(StuckReason::ApplyNonFunction);
  return next(plug(fr, n - 1, bind_value(top->binder, NumV{v}, top->rest)));
}

}  // namespace

StepResult step(const TermPtr& m) { return fire(decompose(m)).result; }

std::optional<std::size_t> redex_depth(const TermPtr& m) {
  auto f = decompose(m);
  if (!fire(f).reduced) return std::nullopt;
  // The frame a rule consumes belongs to the redex, not to its context.
  const Term& r = *f.redex;
  bool consumes = r.is<Prd>() || r.is<Lam>() || r.is<Op>();
  return f.frames.size() - (consumes ? 1 : 0);
}

RunResult run(const TermPtr& m, std::size_t fuel, bool keep_trace) {
  RunResult out{0, FuelExhausted{}, m, {}};
  TermPtr cur = m;
  if (keep_trace) out.trace.push_back(cur);
  for (;;) {
    auto r = step(cur);
    if (auto nx = std::get_if<Next>(&r)) {
      if (out.steps == fuel) break;
      ++out.steps;
      cur = nx->term;
      if (keep_trace) out.trace.push_back(cur);
      continue;
    }
    if (auto t = std::get_if<Terminal<Value>>(&r)) out.end = *t;
    else out.end = std::get<Stuck>(r);
    break;
  }
  out.last = cur;
  return out;
}

Observation observe_value(const Value& v) {
  Observation o{};
  if (auto n = std::get_if<NumV>(&v)) {
    o.kind = Observation::Kind::Number;
    o.number = n->n;
  } else if (auto x = std::get_if<VarV>(&v)) {
    o.kind = Observation::Kind::Symbol;
    o.symbol = x->name;
  } else {
    o.kind = Observation::Kind::Thunk;
  }
  return o;
}

Observation observe(const End& e) {
  Observation o{};
  if (auto t = std::get_if<Terminal<Value>>(&e)) {
    if (t->kind == TerminalKind::AwaitingArgument) {
      o.kind = Observation::Kind::Awaiting;
      return o;
    }
    return observe_value(*t->value);
  }
  if (auto s = std::get_if<Stuck>(&e)) {
    o.kind = Observation::Kind::Stuck;
    o.reason = s->reason;
    return o;
  }
  o.kind = Observation::Kind::OutOfFuel;
  return o;
}

Equivalence observe_equiv(const TermPtr& m, const TermPtr& n, std::size_t fuel) {
  auto a = observe(run(m, fuel).end);
  auto b = observe(run(n, fuel).end);
  if (a.kind == Observation::Kind::OutOfFuel || b.kind == Observation::Kind::OutOfFuel)
    return Equivalence::Unknown;
  return a == b ? Equivalence::Equivalent : Equivalence::Inequivalent;
}

}  // namespace cbpv::sos
