#include <random>

#include "cbpv/error.hpp"
#include "cbpv/harness.hpp"
#include "cbpv/path.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cbpv;
using testing::T;

namespace {

// Naive descent used as an oracle for subterm_at.
NodeRef naive(const Term& t, std::vector<std::uint32_t> rest);

NodeRef naive_v(const Value& v, std::vector<std::uint32_t> rest) {
  if (rest.empty()) return &v;
  auto th = std::get_if<ThunkV>(&v);
  REQUIRE(th);
  REQUIRE(rest[0] == 0);
  rest.erase(rest.begin());
  return naive(*th->body, rest);
}

NodeRef naive(const Term& t, std::vector<std::uint32_t> rest) {
  if (rest.empty()) return &t;
  auto n = rest[0];
  rest.erase(rest.begin());
  if (auto x = t.as<Force>()) return naive_v(x->v, rest);
  if (auto x = t.as<Prd>()) return naive_v(x->v, rest);
  if (auto x = t.as<App>()) return n == 0 ? naive_v(x->arg, rest) : naive(*x->body, rest);
  if (auto x = t.as<Lam>()) return naive(*x->body, rest);
  if (auto x = t.as<Seq>()) return naive(n == 0 ? *x->left : *x->right, rest);
  if (auto x = t.as<LetRec>()) return naive(n == 0 ? *x->body : *x->defs[n - 1].body, rest);
  if (auto x = t.as<If0>()) {
    if (n == 0) return naive_v(x->guard, rest);
    return naive(n == 1 ? *x->then_branch : *x->else_branch, rest);
  }
  auto o = t.as<Op>();
  return naive_v(n == 0 ? o->lhs : o->rhs, rest);
}

void all_paths(const Term& root, NodeRef at, const Path& p, std::vector<Path>& out) {
  out.push_back(p);
  for (std::uint32_t n = 0; n < 8; ++n) {
    try {
      NodeRef c = child_node(at, n);
      all_paths(root, c, p.child(n), out);
    } catch (const Error&) {
    }
  }
}

}  // namespace

TEST_CASE("path text form") {
  CHECK(Path{}.str() == "ε");
  Path p = Path{}.child(1).child(0).child(2);
  CHECK(p.str() == "1.0.2");
  CHECK(Path::parse("1.0.2") == p);
  CHECK(Path::parse("ε").empty());
  CHECK(p.parent().str() == "1.0");
  CHECK(p.last() == 2);
  CHECK(Path::parse("1").encloses(p));
  CHECK_FALSE(p.encloses(Path::parse("1")));
  CHECK(Path::parse("0.5") < Path::parse("1"));  // preorder
  CHECK(Path::parse("1") < Path::parse("1.0"));
}

TEST_CASE("subterm_at") {
  auto p = build::if0(build::var("v"), build::prd(build::num(1)), build::prd(build::num(2)));
  auto m2 = std::get<const Term*>(subterm_at(*p, Path::parse("2")));
  CHECK(same(*m2, *build::prd(build::num(2))));
  CHECK(std::get<const Term*>(subterm_at(*p, Path{})) == p.get());

  auto f1 = T("1 + 2 to x in prd x");
  auto v = std::get<const Value*>(subterm_at(*f1, Path::parse("0.1")));
  CHECK(std::get<NumV>(*v).n == 2);
  CHECK_THROWS_AS(subterm_at(*f1, Path::parse("0.2")), Error);
  CHECK_THROWS_AS(computation_at(*f1, Path::parse("0.1")), Error);
}

TEST_CASE("subterm_at agrees with a naive descent on generated terms") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto m = harness::gen_term(seed, 25);
    std::vector<Path> ps;
    all_paths(*m, m.get(), Path{}, ps);
    for (auto& p : ps) {
      auto ix = p.indices();
      CHECK(subterm_at(*m, p) == naive(*m, {ix.begin(), ix.end()}));
    }
  }
}

TEST_CASE("substitute") {
  auto five = build::num(5);
  CHECK(same(*substitute(T("prd x"), {{"x", five}}), *T("prd 5")));
  CHECK(same(*substitute(T("\\x. prd x"), {{"x", five}}), *T("\\x. prd x")));

  auto r = substitute(T("\\y. prd x"), {{"x", build::thunk(T("prd y"))}});
  CHECK(same(*r, *T("\\y'. prd thunk { prd y }")));
  CHECK(r->fv == std::vector<std::string>{"y"});

  // simultaneous: x and y swap
  auto sw = substitute(T("x + y"), {{"x", build::var("y")}, {"y", build::var("x")}});
  CHECK(same(*sw, *T("y + x")));
}

TEST_CASE("substitution properties on generated terms") {
  std::mt19937_64 rng(7);
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    harness::GenOptions open;
    open.closed = false;
    open.ill_formed = true;
    auto m = harness::gen_term(seed, 20, open);
    CHECK(alpha_eq(substitute(m, {}), m));

    // Sequential substitution agrees with the simultaneous one.
    Value v = (rng() % 2) ? build::num(static_cast<std::int64_t>(rng() % 9)) : build::var("c");
    Value w = build::thunk(T("prd b"));
    auto seq = substitute(substitute(m, {{"a", v}}), {{"b", w}});
    auto sim = substitute(m, {{"a", substitute(v, {{"b", w}})}, {"b", w}});
    CHECK(alpha_eq(seq, sim));
  }
}

TEST_CASE("alpha equivalence") {
  CHECK(alpha_eq(T("\\x. prd x"), T("\\y. prd y")));
  CHECK(alpha_eq(T("\\x. prd z"), T("\\y. prd z")));
  CHECK_FALSE(alpha_eq(T("prd x"), T("prd y")));
  CHECK_FALSE(alpha_eq(T("\\x. \\y. prd x"), T("\\x. \\y. prd y")));
  CHECK(alpha_eq(T("letrec f = force g and g = force f in force f"),
                 T("letrec p = force q and q = force p in force p")));
  CHECK(alpha_eq(T("1 + 2 to x in prd x"), T("1 + 2 to y in prd y")));
}

TEST_CASE("alpha_eq is an equivalence on generated terms") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto a = harness::gen_term(seed, 20);
    auto b = harness::gen_term(seed + 1, 20);
    auto c = harness::gen_term(seed + 2, 20);
    CHECK(alpha_eq(a, a));
    CHECK(alpha_eq(a, b) == alpha_eq(b, a));
    if (alpha_eq(a, b) && alpha_eq(b, c)) CHECK(alpha_eq(a, c));
    CHECK(alpha_eq(build::lam("q", a), build::lam("r", a)));  // a is closed
  }
}

TEST_CASE("resolve_binder") {
  auto f5 = testing::fixture("f5");
  auto x = resolve_binder(*f5, Path::parse("1.0.0.0.0"));
  REQUIRE(std::holds_alternative<LamBind>(x));
  CHECK(std::get<LamBind>(x).at.str() == "1.0");

  // mult under the tail force: else branch of the inner if0, three apps down
  Path occ = Path::parse("1.0.0.0.2.1.2.1.1.1.1.0");
  REQUIRE(std::holds_alternative<VarV>(value_at(*f5, occ)));
  auto m = resolve_binder(*f5, occ);
  REQUIRE(std::holds_alternative<RecBind>(m));
  CHECK(std::get<RecBind>(m).at.empty());
  CHECK(std::get<RecBind>(m).index == 1);

  auto a = resolve_binder(*T("prd a"), Path::parse("0"));
  CHECK(std::get<FreeVar>(a).name == "a");
  CHECK_THROWS_AS(resolve_binder(*T("prd 1"), Path::parse("0")), Error);

  // leftmost duplicate wins
  auto d = T("letrec f = prd 1 and f = prd 2 in force f");
  CHECK(std::get<RecBind>(resolve_binder(*d, Path::parse("0.0"))).index == 1);
}

TEST_CASE("resolve_binder never reports a free variable in a closed term") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto m = harness::gen_term(seed, 25);
    REQUIRE(m->fv.empty());
    Program prog(m);
    std::vector<Path> ps;
    all_paths(*m, m.get(), Path{}, ps);
    for (auto& p : ps) {
      auto r = subterm_at(*m, p);
      auto v = std::get_if<const Value*>(&r);
      if (v && std::holds_alternative<VarV>(**v)) CHECK_FALSE(std::holds_alternative<FreeVar>(prog.binder(p)));
    }
  }
}

TEST_CASE("free_vars") {
  CHECK(free_vars(*T("prd x")) == std::vector<std::string>{"x"});
  CHECK(free_vars(*T("\\x. prd x")).empty());
  CHECK(free_vars(*T("letrec f = force f in force f")).empty());
  CHECK(free_vars(*T("x + y to z in prd w")) == std::vector<std::string>{"w", "x", "y"});
}

TEST_CASE("arithmetic wraps") {
  CHECK(apply_arith(ArithOp::Add, INT64_MAX, 1) == INT64_MIN);
  CHECK(apply_arith(ArithOp::Sub, 3, 5) == -2);
  CHECK(apply_arith(ArithOp::Mul, 6, 7) == 42);
}
