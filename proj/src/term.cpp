#include "cbpv/term.hpp"

#include <algorithm>
#include <set>

namespace cbpv {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

using Names = std::vector<std::string>;

void merge_into(Names& out, const Names& in) {
  if (in.empty()) return;
  Names merged;
  merged.reserve(out.size() + in.size());
  std::set_union(out.begin(), out.end(), in.begin(), in.end(), std::back_inserter(merged));
  out.swap(merged);
}

void erase_name(Names& v, const std::string& x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it != v.end() && *it == x) v.erase(it);
}

bool has_name(const Names& v, const std::string& x) {
  return std::binary_search(v.begin(), v.end(), x);
}

void value_fv(const Value& v, Names& out) {
  std::visit(overloaded{
                 [&](const VarV& x) { merge_into(out, Names{x.name}); },
                 [](const NumV&) {},
                 [&](const ThunkV& t) { merge_into(out, t.body->fv); },
             },
             v);
}

std::size_t value_size(const Value& v) {
  if (auto t = std::get_if<ThunkV>(&v)) return 1 + t->body->size;
  return 1;
}

}  // namespace

std::int64_t apply_arith(ArithOp op, std::int64_t a, std::int64_t b) {
  auto ua = static_cast<std::uint64_t>(a), ub = static_cast<std::uint64_t>(b);
  std::uint64_t r = 0;
  switch (op) {
    case ArithOp::Add: r = ua + ub; break;
    case ArithOp::Sub: r = ua - ub; break;
    case ArithOp::Mul: r = ua * ub; break;
  }
  return static_cast<std::int64_t>(r);
}

const char* symbol(ArithOp op) {
  switch (op) {
    case ArithOp::Add: return "+";
    case ArithOp::Sub: return "-";
    case ArithOp::Mul: return "*";
  }
  return "?";
}

const char* mnemonic(ArithOp op) {
  switch (op) {
    case ArithOp::Add: return "ADD";
    case ArithOp::Sub: return "SUB";
    case ArithOp::Mul: return "MUL";
  }
  return "?";
}

Term::Term(Node n) : node(std::move(n)) {
  std::visit(overloaded{
                 [&](const Force& f) { value_fv(f.v, fv); size += value_size(f.v); },
                 [&](const Prd& p) { value_fv(p.v, fv); size += value_size(p.v); },
                 [&](const App& a) {
                   value_fv(a.arg, fv);
                   merge_into(fv, a.body->fv);
                   size += value_size(a.arg) + a.body->size;
                 },
                 [&](const Lam& l) {
                   fv = l.body->fv;
                   erase_name(fv, l.binder);
                   size += l.body->size;
                 },
                 [&](const Seq& s) {
                   Names r = s.right->fv;
                   erase_name(r, s.binder);
                   fv = s.left->fv;
                   merge_into(fv, r);
                   size += s.left->size + s.right->size;
                 },
                 [&](const LetRec& l) {
                   fv = l.body->fv;
                   size += l.body->size;
                   for (auto& d : l.defs) {
                     merge_into(fv, d.body->fv);
                     size += d.body->size;
                   }
                   for (auto& d : l.defs) erase_name(fv, d.name);
                 },
                 [&](const If0& i) {
                   value_fv(i.guard, fv);
                   merge_into(fv, i.then_branch->fv);
                   merge_into(fv, i.else_branch->fv);
                   size += value_size(i.guard) + i.then_branch->size + i.else_branch->size;
                 },
                 [&](const Op& o) {
                   value_fv(o.lhs, fv);
                   value_fv(o.rhs, fv);
                   size += value_size(o.lhs) + value_size(o.rhs);
                 },
             },
             node);
}

namespace build {
Value var(std::string x) { return VarV{std::move(x)}; }
Value num(std::int64_t n) { return NumV{n}; }
Value thunk(TermPtr m) { return ThunkV{std::move(m)}; }
TermPtr force(Value v) { return std::make_shared<const Term>(Force{std::move(v)}); }
TermPtr prd(Value v) { return std::make_shared<const Term>(Prd{std::move(v)}); }
TermPtr app(Value v, TermPtr m) {
  return std::make_shared<const Term>(App{std::move(v), std::move(m)});
}
TermPtr lam(std::string x, TermPtr m) {
  return std::make_shared<const Term>(Lam{std::move(x), std::move(m)});
}
TermPtr seq(TermPtr n, std::string x, TermPtr m) {
  return std::make_shared<const Term>(Seq{std::move(n), std::move(x), std::move(m)});
}
TermPtr letrec(std::vector<Def> defs, TermPtr body) {
  return std::make_shared<const Term>(LetRec{std::move(defs), std::move(body)});
}
TermPtr if0(Value v, TermPtr m1, TermPtr m2) {
  return std::make_shared<const Term>(If0{std::move(v), std::move(m1), std::move(m2)});
}
TermPtr op(Value a, ArithOp o, Value b) {
  return std::make_shared<const Term>(Op{std::move(a), o, std::move(b)});
}
}  // namespace build

// ---------------------------------------------------------------- paths

namespace {

[[noreturn]] void bad_path(const Path& p) {
  throw Error(ErrorKind::InvalidPath, "no node at path " + p.str());
}

NodeRef child_of(const Term& t, std::uint32_t n, const Path& full) {
  return std::visit(
      overloaded{
          [&](const Force& f) -> NodeRef {
            if (n == 0) return &f.v;
            bad_path(full);
          },
          [&](const Prd& p) -> NodeRef {
            if (n == 0) return &p.v;
            bad_path(full);
          },
          [&](const App& a) -> NodeRef {
            if (n == 0) return &a.arg;
            if (n == 1) return a.body.get();
            bad_path(full);
          },
          [&](const Lam& l) -> NodeRef {
            if (n == 0) return l.body.get();
            bad_path(full);
          },
          [&](const Seq& s) -> NodeRef {
            if (n == 0) return s.left.get();
            if (n == 1) return s.right.get();
            bad_path(full);
          },
          [&](const LetRec& l) -> NodeRef {
            if (n == 0) return l.body.get();
            if (n <= l.defs.size()) return l.defs[n - 1].body.get();
            bad_path(full);
          },
          [&](const If0& i) -> NodeRef {
            if (n == 0) return &i.guard;
            if (n == 1) return i.then_branch.get();
            if (n == 2) return i.else_branch.get();
            bad_path(full);
          },
          [&](const Op& o) -> NodeRef {
            if (n == 0) return &o.lhs;
            if (n == 1) return &o.rhs;
            bad_path(full);
          },
      },
      t.node);
}

NodeRef descend(NodeRef cur, std::uint32_t n, const Path& full) {
  if (auto t = std::get_if<const Term*>(&cur)) return child_of(**t, n, full);
  auto th = std::get_if<ThunkV>(std::get<const Value*>(cur));
  if (!th || n != 0) bad_path(full);
  return th->body.get();
}

}  // namespace

NodeRef child_node(NodeRef parent, std::uint32_t n) {
  return descend(parent, n, Path{std::vector<std::uint32_t>{n}});
}

NodeRef subterm_at(const Term& root, const Path& p) {
  NodeRef cur = &root;
  for (auto n : p.indices()) cur = descend(cur, n, p);
  return cur;
}

const Term& computation_at(const Term& root, const Path& p) {
  auto r = subterm_at(root, p);
  if (auto t = std::get_if<const Term*>(&r)) return **t;
  throw Error(ErrorKind::NotAComputation, "value at path " + p.str());
}

const Value& value_at(const Term& root, const Path& p) {
  auto r = subterm_at(root, p);
  if (auto v = std::get_if<const Value*>(&r)) return **v;
  throw Error(ErrorKind::NotAValue, "computation at path " + p.str());
}

BinderRef resolve_binder(const Term& root, const Path& occ) {
  const Value& v = value_at(root, occ);
  auto var = std::get_if<VarV>(&v);
  if (!var) throw Error(ErrorKind::NotAVariable, "not a variable at " + occ.str());
  const std::string& x = var->name;

  // Collect the node chain once, then scan from the occurrence upward.
  std::vector<NodeRef> chain;
  chain.reserve(occ.depth() + 1);
  NodeRef cur = &root;
  chain.push_back(cur);
  auto idx = occ.indices();
  for (auto n : idx) {
    cur = descend(cur, n, occ);
    chain.push_back(cur);
  }
  for (std::size_t d = idx.size(); d-- > 0;) {
    auto t = std::get_if<const Term*>(&chain[d]);
    if (!t) continue;
    std::uint32_t n = idx[d];
    Path at{std::vector<std::uint32_t>(idx.begin(), idx.begin() + d)};
    if (auto l = (*t)->as<Lam>(); l && n == 0 && l->binder == x) return LamBind{at};
    if (auto s = (*t)->as<Seq>(); s && n == 1 && s->binder == x) return SeqBind{at};
    if (auto r = (*t)->as<LetRec>()) {
      for (std::size_t j = 0; j < r->defs.size(); ++j)
        if (r->defs[j].name == x) return RecBind{at, j + 1};
    }
  }
  return FreeVar{x};
}

std::vector<std::string> free_vars(const Term& m) { return m.fv; }
std::vector<std::string> free_vars(const Value& v) {
  Names out;
  value_fv(v, out);
  return out;
}

// --------------------------------------------------------- substitution

namespace {

std::string fresh_name(const std::string& x, const std::set<std::string>& avoid) {
  std::string y = x + "'";
  while (avoid.count(y)) y += "'";
  return y;
}

bool touches(const Names& fv, const Subst& s) {
  if (s.empty() || fv.empty()) return false;
  if (s.size() < fv.size()) {
    for (auto& [k, _] : s)
      if (has_name(fv, k)) return true;
    return false;
  }
  for (auto& x : fv)
    if (s.count(x)) return true;
  return false;
}

Value subst_value(const Value& v, const Subst& s);
TermPtr subst_term(const TermPtr& m, const Subst& s);

// Keys of s that actually occur in fv.
std::vector<const Value*> relevant(const Names& fv, const Subst& s) {
  std::vector<const Value*> out;
  for (auto& [k, v] : s)
    if (has_name(fv, k)) out.push_back(&v);
  return out;
}

bool captured_by(const std::string& x, const std::vector<const Value*>& vals) {
  for (auto v : vals) {
    Names f;
    value_fv(*v, f);
    if (has_name(f, x)) return true;
  }
  return false;
}

std::pair<std::string, TermPtr> under(const std::string& x, const TermPtr& m, const Subst& s) {
  if (!touches(m->fv, s)) return {x, m};
  Subst inner = s;
  inner.erase(x);
  auto vals = relevant(m->fv, inner);
  if (vals.empty()) return {x, m};
  if (!captured_by(x, vals)) return {x, subst_term(m, inner)};
  std::set<std::string> avoid(m->fv.begin(), m->fv.end());
  for (auto v : vals) {
    Names f;
    value_fv(*v, f);
    avoid.insert(f.begin(), f.end());
  }
  avoid.insert(x);
  std::string y = fresh_name(x, avoid);
  inner[x] = VarV{y};
  return {y, subst_term(m, inner)};
}

Value subst_value(const Value& v, const Subst& s) {
  return std::visit(overloaded{
                        [&](const VarV& x) -> Value {
                          auto it = s.find(x.name);
                          return it == s.end() ? v : it->second;
                        },
                        [&](const NumV&) -> Value { return v; },
                        [&](const ThunkV& t) -> Value { return ThunkV{subst_term(t.body, s)}; },
                    },
                    v);
}

TermPtr subst_term(const TermPtr& m, const Subst& s) {
  if (!touches(m->fv, s)) return m;
  using namespace build;
  return std::visit(
      overloaded{
          [&](const Force& f) { return force(subst_value(f.v, s)); },
          [&](const Prd& p) { return prd(subst_value(p.v, s)); },
          [&](const App& a) { return app(subst_value(a.arg, s), subst_term(a.body, s)); },
          [&](const Lam& l) {
            auto [y, b] = under(l.binder, l.body, s);
            return lam(y, b);
          },
          [&](const Seq& q) {
            auto [y, b] = under(q.binder, q.right, s);
            return seq(subst_term(q.left, s), y, b);
          },
          [&](const LetRec& r) {
            Subst inner = s;
            for (auto& d : r.defs) inner.erase(d.name);
            Names all = r.body->fv;
            for (auto& d : r.defs) merge_into(all, d.body->fv);
            auto vals = relevant(all, inner);
            std::set<std::string> names;
            for (auto& d : r.defs) names.insert(d.name);
            std::set<std::string> avoid(all.begin(), all.end());
            avoid.insert(names.begin(), names.end());
            for (auto v : vals) {
              Names f;
              value_fv(*v, f);
              avoid.insert(f.begin(), f.end());
            }
            std::map<std::string, std::string> renamed;
            for (auto& x : names) {
              if (!captured_by(x, vals)) continue;
              std::string y = fresh_name(x, avoid);
              avoid.insert(y);
              renamed[x] = y;
              inner[x] = VarV{y};
            }
            std::vector<Def> defs;
            defs.reserve(r.defs.size());
            for (auto& d : r.defs) {
              auto it = renamed.find(d.name);
              defs.push_back({it == renamed.end() ? d.name : it->second, subst_term(d.body, inner)});
            }
            return letrec(std::move(defs), subst_term(r.body, inner));
          },
          [&](const If0& i) {
            return if0(subst_value(i.guard, s), subst_term(i.then_branch, s),
                       subst_term(i.else_branch, s));
          },
          [&](const Op& o) { return op(subst_value(o.lhs, s), o.op, subst_value(o.rhs, s)); },
      },
      m->node);
}

}  // namespace

TermPtr substitute(const TermPtr& m, const Subst& s) { return subst_term(m, s); }
Value substitute(const Value& v, const Subst& s) { return subst_value(v, s); }
std::pair<std::string, TermPtr> substitute_under(const std::string& x, const TermPtr& m,
                                                 const Subst& s) {
  return under(x, m, s);
}

// ---------------------------------------------------------- α-equality

namespace {

struct Scope {
  std::vector<std::pair<const std::string*, int>> a, b;
  int next = 0;

  static int find(const std::vector<std::pair<const std::string*, int>>& v, const std::string& x) {
    for (auto it = v.rbegin(); it != v.rend(); ++it)
      if (*it->first == x) return it->second;
    return -1;
  }
};

bool aeq(const Term& a, const Term& b, Scope& sc);

bool aeq_var(const std::string& x, const std::string& y, Scope& sc) {
  int i = Scope::find(sc.a, x), j = Scope::find(sc.b, y);
  if (i < 0 && j < 0) return x == y;
  return i == j;
}

bool aeq(const Value& a, const Value& b, Scope& sc) {
  if (a.index() != b.index()) return false;
  if (auto x = std::get_if<VarV>(&a)) return aeq_var(x->name, std::get<VarV>(b).name, sc);
  if (auto n = std::get_if<NumV>(&a)) return n->n == std::get<NumV>(b).n;
  return aeq(*std::get<ThunkV>(a).body, *std::get<ThunkV>(b).body, sc);
}

template <class F>
bool binding(Scope& sc, const std::string& x, const std::string& y, F&& f) {
  int id = sc.next++;
  sc.a.push_back({&x, id});
  sc.b.push_back({&y, id});
  bool r = f();
  sc.a.pop_back();
  sc.b.pop_back();
  return r;
}

bool aeq(const Term& a, const Term& b, Scope& sc) {
  if (&a == &b) {
    bool same_scope = true;
    for (auto& x : a.fv) {
      if (Scope::find(sc.a, x) != Scope::find(sc.b, x)) {
        same_scope = false;
        break;
      }
    }
    if (same_scope) return true;
  }
  if (a.node.index() != b.node.index() || a.size != b.size) return false;
  return std::visit(
      overloaded{
          [&](const Force& f) { return aeq(f.v, b.as<Force>()->v, sc); },
          [&](const Prd& p) { return aeq(p.v, b.as<Prd>()->v, sc); },
          [&](const App& x) {
            auto y = b.as<App>();
            return aeq(x.arg, y->arg, sc) && aeq(*x.body, *y->body, sc);
          },
          [&](const Lam& x) {
            auto y = b.as<Lam>();
            return binding(sc, x.binder, y->binder, [&] { return aeq(*x.body, *y->body, sc); });
          },
          [&](const Seq& x) {
            auto y = b.as<Seq>();
            return aeq(*x.left, *y->left, sc) &&
                   binding(sc, x.binder, y->binder, [&] { return aeq(*x.right, *y->right, sc); });
          },
          [&](const LetRec& x) {
            auto y = b.as<LetRec>();
            if (x.defs.size() != y->defs.size()) return false;
            std::size_t mark = sc.a.size();
            // Pushed right to left so the leftmost duplicate wins on lookup.
            for (std::size_t j = x.defs.size(); j-- > 0;) {
              int id = sc.next++;
              sc.a.push_back({&x.defs[j].name, id});
              sc.b.push_back({&y->defs[j].name, id});
            }
            bool r = aeq(*x.body, *y->body, sc);
            for (std::size_t j = 0; r && j < x.defs.size(); ++j)
              r = aeq(*x.defs[j].body, *y->defs[j].body, sc);
            sc.a.resize(mark);
            sc.b.resize(mark);
            return r;
          },
          [&](const If0& x) {
            auto y = b.as<If0>();
            return aeq(x.guard, y->guard, sc) && aeq(*x.then_branch, *y->then_branch, sc) &&
                   aeq(*x.else_branch, *y->else_branch, sc);
          },
          [&](const Op& x) {
            auto y = b.as<Op>();
            return x.op == y->op && aeq(x.lhs, y->lhs, sc) && aeq(x.rhs, y->rhs, sc);
          },
      },
      a.node);
}

}  // namespace

bool alpha_eq(const Term& a, const Term& b) {
  Scope sc;
  return aeq(a, b, sc);
}

bool alpha_eq(const Value& a, const Value& b) {
  Scope sc;
  return aeq(a, b, sc);
}

// ----------------------------------------------------- structural equality

bool same(const Value& a, const Value& b) {
  if (a.index() != b.index()) return false;
  if (auto x = std::get_if<VarV>(&a)) return x->name == std::get<VarV>(b).name;
  if (auto n = std::get_if<NumV>(&a)) return n->n == std::get<NumV>(b).n;
  return same(*std::get<ThunkV>(a).body, *std::get<ThunkV>(b).body);
}

bool same(const Term& a, const Term& b) {
  if (&a == &b) return true;
  if (a.node.index() != b.node.index() || a.size != b.size) return false;
  return std::visit(
      overloaded{
          [&](const Force& f) { return same(f.v, b.as<Force>()->v); },
          [&](const Prd& p) { return same(p.v, b.as<Prd>()->v); },
          [&](const App& x) {
            auto y = b.as<App>();
            return same(x.arg, y->arg) && same(*x.body, *y->body);
          },
          [&](const Lam& x) {
            auto y = b.as<Lam>();
            return x.binder == y->binder && same(*x.body, *y->body);
          },
          [&](const Seq& x) {
            auto y = b.as<Seq>();
            return x.binder == y->binder && same(*x.left, *y->left) && same(*x.right, *y->right);
          },
          [&](const LetRec& x) {
            auto y = b.as<LetRec>();
            if (x.defs.size() != y->defs.size()) return false;
            for (std::size_t j = 0; j < x.defs.size(); ++j)
              if (x.defs[j].name != y->defs[j].name || !same(*x.defs[j].body, *y->defs[j].body))
                return false;
            return same(*x.body, *y->body);
          },
          [&](const If0& x) {
            auto y = b.as<If0>();
            return same(x.guard, y->guard) && same(*x.then_branch, *y->then_branch) &&
                   same(*x.else_branch, *y->else_branch);
          },
          [&](const Op& x) {
            auto y = b.as<Op>();
            return x.op == y->op && same(x.lhs, y->lhs) && same(x.rhs, y->rhs);
          },
      },
      a.node);
}

// -------------------------------------------------------------- printer

namespace {

enum class Ctx { Top, SeqLeft, AppBody };

// Does an application chain end in a lambda or letrec that would swallow
// a trailing "to"?
bool open_tail(const Term& m) {
  if (m.is<Lam>() || m.is<LetRec>()) return true;
  if (auto a = m.as<App>()) return open_tail(*a->body);
  return false;
}

bool right_open(const Term& m) { return m.is<Seq>() || open_tail(m); }

void emit(const Term& m, Ctx ctx, std::string& out);

void emit(const Value& v, std::string& out) {
  std::visit(overloaded{
                 [&](const VarV& x) { out += x.name; },
                 [&](const NumV& n) { out += std::to_string(n.n); },
                 [&](const ThunkV& t) {
                   out += "thunk { ";
                   emit(*t.body, Ctx::Top, out);
                   out += " }";
                 },
             },
             v);
}

void emit(const Term& m, Ctx ctx, std::string& out) {
  bool paren = false;
  if (ctx == Ctx::SeqLeft) paren = right_open(m);
  if (ctx == Ctx::AppBody) paren = m.is<Seq>();
  if (paren) out += '(';
  std::visit(overloaded{
                 [&](const Force& f) {
                   out += "force ";
                   emit(f.v, out);
                 },
                 [&](const Prd& p) {
                   out += "prd ";
                   emit(p.v, out);
                 },
                 [&](const App& a) {
                   emit(a.arg, out);
                   out += " . ";
                   emit(*a.body, Ctx::AppBody, out);
                 },
                 [&](const Lam& l) {
                   out += '\\';
                   out += l.binder;
                   out += ". ";
                   emit(*l.body, Ctx::Top, out);
                 },
                 [&](const Seq& s) {
                   emit(*s.left, Ctx::SeqLeft, out);
                   out += " to ";
                   out += s.binder;
                   out += " in ";
                   emit(*s.right, Ctx::Top, out);
                 },
                 [&](const LetRec& r) {
                   out += "letrec ";
                   for (std::size_t j = 0; j < r.defs.size(); ++j) {
                     if (j) out += " and ";
                     out += r.defs[j].name;
                     out += " = ";
                     emit(*r.defs[j].body, Ctx::Top, out);
                   }
                   out += " in ";
                   emit(*r.body, Ctx::Top, out);
                 },
                 [&](const If0& i) {
                   out += "if0 ";
                   emit(i.guard, out);
                   out += " { ";
                   emit(*i.then_branch, Ctx::Top, out);
                   out += " } { ";
                   emit(*i.else_branch, Ctx::Top, out);
                   out += " }";
                 },
                 [&](const Op& o) {
                   emit(o.lhs, out);
                   out += ' ';
                   out += symbol(o.op);
                   out += ' ';
                   emit(o.rhs, out);
                 },
             },
             m.node);
  if (paren) out += ')';
}

}  // namespace

std::string print(const Term& m) {
  std::string out;
  emit(m, Ctx::Top, out);
  return out;
}

std::string print(const Value& v) {
  std::string out;
  emit(v, out);
  return out;
}

}  // namespace cbpv
