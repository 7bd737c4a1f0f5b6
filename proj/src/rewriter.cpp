#include "cbpv/rewriter.hpp"

#include <functional>
#include <span>

#include "cbpv/error.hpp"
#include "cbpv/run.hpp"
#include "cbpv/sos.hpp"

namespace cbpv {

const char* to_string(RuleId r) {
  switch (r) {
    case RuleId::ForceThunk: return "ForceThunk";
    case RuleId::Beta: return "Beta";
    case RuleId::MoveElim: return "MoveElim";
    case RuleId::ConstFold: return "ConstFold";
    case RuleId::Inline: return "Inline";
    case RuleId::DeadTrue: return "DeadTrue";
    case RuleId::DeadFalse: return "DeadFalse";
    case RuleId::BranchElim: return "BranchElim";
  }
  return "?";
}

const std::vector<RuleId>& all_rules() {
  static const std::vector<RuleId> rs = {RuleId::ForceThunk, RuleId::Beta,     RuleId::MoveElim,
                                         RuleId::ConstFold,  RuleId::Inline,   RuleId::DeadTrue,
                                         RuleId::DeadFalse,  RuleId::BranchElim};
  return rs;
}

std::optional<RuleId> parse_rule(const std::string& s) {
  for (auto r : all_rules())
    if (s == to_string(r)) return r;
  return std::nullopt;
}

std::string RewriteStep::str() const { return std::string(to_string(rule)) + " @ " + at.str(); }

bool producer_shaped(const Term& m) {
  if (m.is<Prd>() || m.is<Op>()) return true;
  if (auto s = m.as<Seq>()) return producer_shaped(*s->right);
  if (auto i = m.as<If0>()) return producer_shaped(*i->then_branch) && producer_shaped(*i->else_branch);
  if (auto r = m.as<LetRec>()) return producer_shaped(*r->body);
  return false;
}

namespace {

bool is_var(const Value& v, const std::string& x) {
  auto n = std::get_if<VarV>(&v);
  return n && n->name == x;
}

bool right_unit(const Seq& s) {
  auto p = s.right->as<Prd>();
  return p && is_var(p->v, s.binder) && producer_shaped(*s.left);
}

// The rewritten term, or null when r does not match m.
TermPtr rewrite(const Term& m, RuleId r) {
  switch (r) {
    case RuleId::ForceThunk:
      if (auto f = m.as<Force>())
        if (auto t = std::get_if<ThunkV>(&f->v)) return t->body;
      return nullptr;
    case RuleId::Inline:
    case RuleId::Beta: {
      auto a = m.as<App>();
      if (!a) return nullptr;
      auto l = a->body->as<Lam>();
      if (!l) return nullptr;
      if (r == RuleId::Inline) {
        auto t = std::get_if<ThunkV>(&a->arg);
        if (!t || !t->body->is<Lam>()) return nullptr;
      }
      return substitute(l->body, Subst{{l->binder, a->arg}});
    }
    case RuleId::MoveElim: {
      auto s = m.as<Seq>();
      if (!s) return nullptr;
      if (auto p = s->left->as<Prd>()) return substitute(s->right, Subst{{s->binder, p->v}});
      if (right_unit(*s)) return s->left;
      return nullptr;
    }
    case RuleId::ConstFold: {
      auto s = m.as<Seq>();
      if (!s) return nullptr;
      auto o = s->left->as<Op>();
      if (!o) return nullptr;
      auto a = std::get_if<NumV>(&o->lhs);
      auto b = std::get_if<NumV>(&o->rhs);
      if (!a || !b) return nullptr;
      return substitute(s->right, Subst{{s->binder, build::num(apply_arith(o->op, a->n, b->n))}});
    }
    case RuleId::DeadTrue:
    case RuleId::DeadFalse: {
      auto i = m.as<If0>();
      if (!i) return nullptr;
      auto g = std::get_if<NumV>(&i->guard);
      if (!g) return nullptr;
      if (r == RuleId::DeadTrue) return g->n == 0 ? i->then_branch : nullptr;
      return g->n != 0 ? i->else_branch : nullptr;
    }
    case RuleId::BranchElim: {
      auto i = m.as<If0>();
      if (!i || !alpha_eq(*i->then_branch, *i->else_branch)) return nullptr;
      return i->then_branch;
    }
  }
  return nullptr;
}

void walk_value(const Value& v, const Path& p, const std::function<void(const Term&, const Path&)>& f);

void walk(const Term& t, const Path& p, const std::function<void(const Term&, const Path&)>& f) {
  f(t, p);
  if (auto x = t.as<Force>()) walk_value(x->v, p.child(0), f);
  else if (auto x = t.as<Prd>()) walk_value(x->v, p.child(0), f);
  else if (auto x = t.as<App>()) {
    walk_value(x->arg, p.child(0), f);
    walk(*x->body, p.child(1), f);
  } else if (auto x = t.as<Lam>()) {
    walk(*x->body, p.child(0), f);
  } else if (auto x = t.as<Seq>()) {
    walk(*x->left, p.child(0), f);
    walk(*x->right, p.child(1), f);
  } else if (auto x = t.as<LetRec>()) {
    walk(*x->body, p.child(0), f);
    for (std::size_t j = 0; j < x->defs.size(); ++j)
      walk(*x->defs[j].body, p.child(static_cast<std::uint32_t>(j + 1)), f);
  } else if (auto x = t.as<If0>()) {
    walk_value(x->guard, p.child(0), f);
    walk(*x->then_branch, p.child(1), f);
    walk(*x->else_branch, p.child(2), f);
  } else if (auto x = t.as<Op>()) {
    walk_value(x->lhs, p.child(0), f);
    walk_value(x->rhs, p.child(1), f);
  }
}

void walk_value(const Value& v, const Path& p, const std::function<void(const Term&, const Path&)>& f) {
  if (auto t = std::get_if<ThunkV>(&v)) walk(*t->body, p.child(0), f);
}

[[noreturn]] void bad_path(const Path& p) { throw Error(ErrorKind::InvalidPath, "no computation at " + p.str()); }

TermPtr rebuild(const TermPtr& t, std::span<const std::uint32_t> idx, std::size_t i, const TermPtr& sub,
                const Path& full);

Value rebuild_v(const Value& v, std::span<const std::uint32_t> idx, std::size_t i, const TermPtr& sub,
                const Path& full) {
  auto t = std::get_if<ThunkV>(&v);
  if (!t || i == idx.size() || idx[i] != 0) bad_path(full);
  return build::thunk(rebuild(t->body, idx, i + 1, sub, full));
}

TermPtr rebuild(const TermPtr& t, std::span<const std::uint32_t> idx, std::size_t i, const TermPtr& sub,
                const Path& full) {
  if (i == idx.size()) return sub;
  auto n = idx[i];
  auto down = [&](const TermPtr& c) { return rebuild(c, idx, i + 1, sub, full); };
  auto down_v = [&](const Value& v) { return rebuild_v(v, idx, i + 1, sub, full); };
  if (auto x = t->as<Force>(); x && n == 0) return build::force(down_v(x->v));
  if (auto x = t->as<Prd>(); x && n == 0) return build::prd(down_v(x->v));
  if (auto x = t->as<App>()) {
    if (n == 0) return build::app(down_v(x->arg), x->body);
    if (n == 1) return build::app(x->arg, down(x->body));
  }
  if (auto x = t->as<Lam>(); x && n == 0) return build::lam(x->binder, down(x->body));
  if (auto x = t->as<Seq>()) {
    if (n == 0) return build::seq(down(x->left), x->binder, x->right);
    if (n == 1) return build::seq(x->left, x->binder, down(x->right));
  }
  if (auto x = t->as<LetRec>()) {
    if (n == 0) return build::letrec(x->defs, down(x->body));
    if (n <= x->defs.size()) {
      auto defs = x->defs;
      defs[n - 1].body = down(defs[n - 1].body);
      return build::letrec(std::move(defs), x->body);
    }
  }
  if (auto x = t->as<If0>()) {
    if (n == 0) return build::if0(down_v(x->guard), x->then_branch, x->else_branch);
    if (n == 1) return build::if0(x->guard, down(x->then_branch), x->else_branch);
    if (n == 2) return build::if0(x->guard, x->then_branch, down(x->else_branch));
  }
  if (auto x = t->as<Op>()) {
    if (n == 0) return build::op(down_v(x->lhs), x->op, x->rhs);
    if (n == 1) return build::op(x->lhs, x->op, down_v(x->rhs));
  }
  bad_path(full);
}

}  // namespace

bool matches(const Term& m, RuleId r) { return rewrite(m, r) != nullptr; }

std::vector<Redex> find_redexes(const TermPtr& m) {
  std::vector<Redex> out;
  walk(*m, Path{}, [&](const Term& t, const Path& p) {
    for (auto r : all_rules())
      if (matches(t, r)) out.push_back({r, p});
  });
  return out;
}

TermPtr replace_at(const TermPtr& m, const Path& p, const TermPtr& sub) {
  return rebuild(m, p.indices(), 0, sub, p);
}

TermPtr apply_rule(const TermPtr& m, RuleId r, const Path& at) {
  const Term& t = computation_at(*m, at);
  TermPtr out = rewrite(t, r);
  if (!out) throw Error(ErrorKind::NoMatch, std::string(to_string(r)) + " does not match at " + at.str());
  return replace_at(m, at, out);
}

Optimized optimize(const TermPtr& m, const std::set<RuleId>& rules, std::size_t max_passes) {
  Optimized o{m, {}};
  for (std::size_t pass = 0; pass < max_passes; ++pass) {
    std::optional<Redex> pick;
    for (auto& r : find_redexes(o.result))
      if (rules.count(r.rule)) {
        pick = r;
        break;
      }
    if (!pick) break;
    TermPtr next = apply_rule(o.result, pick->rule, pick->at);
    o.log.push_back({pick->rule, pick->at, o.result, next});
    o.result = next;
  }
  return o;
}

namespace {

Equivalence compare(const Observation& a, const Observation& b) {
  if (a.kind == Observation::Kind::OutOfFuel || b.kind == Observation::Kind::OutOfFuel)
    return Equivalence::Unknown;
  return a == b ? Equivalence::Equivalent : Equivalence::Inequivalent;
}

std::string show(const Subst& s) {
  std::string out = "{";
  for (auto& [k, v] : s) {
    if (out.size() > 1) out += ", ";
    out += k + "=" + print(v);
  }
  return out + "}";
}

}  // namespace

ValidationReport validate(const TermPtr& m, const TermPtr& m2, std::size_t fuel,
                          const std::vector<Subst>& valuations) {
  ValidationReport rep;
  for (const auto& val : valuations) {
    ValidationCase c;
    c.valuation = val;
    TermPtr a = val.empty() ? m : substitute(m, val);
    TermPtr b = val.empty() ? m2 : substitute(m2, val);
    c.sos_lhs = run_machine(Machine::Sos, a, fuel).obs;
    c.sos_rhs = run_machine(Machine::Sos, b, fuel).obs;
    c.cfg_lhs = run_machine(Machine::Cfg, a, fuel).obs;
    c.cfg_rhs = run_machine(Machine::Cfg, b, fuel).obs;
    c.sos = compare(c.sos_lhs, c.sos_rhs);
    c.cfg = compare(c.cfg_lhs, c.cfg_rhs);
    auto out = [](const Observation& o) { return o.kind == Observation::Kind::OutOfFuel; };
    if (c.sos == Equivalence::Inequivalent)
      c.problems.push_back("sos: " + c.sos_lhs.str() + " vs " + c.sos_rhs.str());
    if (c.cfg == Equivalence::Inequivalent)
      c.problems.push_back("cfg: " + c.cfg_lhs.str() + " vs " + c.cfg_rhs.str());
    if (out(c.sos_lhs) != out(c.sos_rhs)) c.problems.push_back("fuel exhausted on one side only");
    if (!(c.sos_lhs == c.cfg_lhs) || out(c.sos_lhs) != out(c.cfg_lhs))
      c.problems.push_back("layers disagree on lhs: sos " + c.sos_lhs.str() + ", cfg " + c.cfg_lhs.str());
    if (!(c.sos_rhs == c.cfg_rhs) || out(c.sos_rhs) != out(c.cfg_rhs))
      c.problems.push_back("layers disagree on rhs: sos " + c.sos_rhs.str() + ", cfg " + c.cfg_rhs.str());
    if (!c.problems.empty()) rep.ok = false;
    rep.cases.push_back(std::move(c));
  }
  return rep;
}

std::string ValidationReport::str() const {
  std::string out;
  for (const auto& c : cases) {
    out += show(c.valuation) + ": sos " + to_string(c.sos) + " (" + c.sos_lhs.str() + " / " + c.sos_rhs.str() +
           "), cfg " + to_string(c.cfg) + " (" + c.cfg_lhs.str() + " / " + c.cfg_rhs.str() + ")\n";
    for (const auto& p : c.problems) out += "  problem: " + p + "\n";
  }
  return out;
}

}  // namespace cbpv
