#include "cbpv/harness.hpp"
#include "cbpv/sos.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cbpv;
using testing::T;

namespace {

TermPtr next(const TermPtr& m) {
  auto r = sos::step(m);
  REQUIRE(std::holds_alternative<sos::Next>(r));
  return std::get<sos::Next>(r).term;
}

}  // namespace

TEST_CASE("unroll") {
  CHECK(same(*sos::unroll(T("prd 0")), *T("prd 0")));
  CHECK(alpha_eq(sos::unroll(T("letrec f = force f in prd f")),
                 T("prd thunk { letrec f = force f in force f }")));
  CHECK(alpha_eq(sos::unroll(T("letrec f = prd 1 in letrec g = prd 2 in force g")),
                 T("force thunk { letrec g = prd 2 in prd 2 }")));
}

TEST_CASE("step") {
  CHECK(same(*next(T("force thunk { prd 0 }")), *T("prd 0")));
  CHECK(same(*next(T("1 + 2 to x in prd x")), *T("prd 3")));
  CHECK(same(*next(T("5 . \\x. prd x")), *T("prd 5")));
  CHECK(same(*next(T("if0 0 { prd 1 } { prd 2 }")), *T("prd 1")));
  CHECK(same(*next(T("if0 4 { prd 1 } { prd 2 }")), *T("prd 2")));
  CHECK(same(*next(T("prd 4 to x in x . \\y. prd y")), *T("4 . \\y. prd y")));

  auto t = sos::step(T("prd 7"));
  REQUIRE(std::holds_alternative<Terminal<Value>>(t));
  CHECK(std::get<NumV>(*std::get<Terminal<Value>>(t).value).n == 7);
  CHECK(std::get<Terminal<Value>>(sos::step(T("\\x. prd x"))).kind == TerminalKind::AwaitingArgument);
  CHECK(std::get<Terminal<Value>>(sos::step(T("2 * 3"))).kind == TerminalKind::BareArith);

  auto stuck = [](const char* src) { return std::get<Stuck>(sos::step(T(src))).reason; };
  CHECK(stuck("force 3") == StuckReason::ForceNonThunk);
  CHECK(stuck("if0 thunk { prd 0 } { prd 1 } { prd 2 }") == StuckReason::GuardNotNumeral);
  CHECK(stuck("1 . prd 2") == StuckReason::ApplyNonFunction);
  CHECK(stuck("(\\x. prd x) to y in prd y") == StuckReason::SequencedNonProducer);
  CHECK(stuck("a + 1") == StuckReason::ArithNonNumeral);
}

TEST_CASE("redex depth") {
  CHECK(sos::redex_depth(T("force thunk { prd 0 }")) == 0u);
  CHECK(sos::redex_depth(T("5 . force thunk { \\x. prd x }")) == 1u);
  CHECK(sos::redex_depth(T("(1 + 2 to x in prd x) to y in prd y")) == 1u);
  CHECK_FALSE(sos::redex_depth(T("prd 0")).has_value());
}

TEST_CASE("run") {
  auto r = sos::run(testing::fixture("f1"), 10);
  CHECK(r.steps == 1);
  CHECK(sos::observe(r.end).number == 3);
  CHECK(std::holds_alternative<FuelExhausted>(sos::run(T("letrec f = force f in force f"), 50).end));
  auto z = sos::run(T("prd 0"), 10, true);
  CHECK(z.steps == 0);
  CHECK(z.trace.size() == 1);
  CHECK(sos::observe(sos::run(testing::fixture("f5_prime"), 1000).end).number == 4);
}

TEST_CASE("observational equivalence") {
  CHECK(sos::observe_equiv(T("force thunk { prd 0 }"), T("prd 0"), 10) == Equivalence::Equivalent);
  CHECK(sos::observe_equiv(T("prd 0"), T("prd 1"), 10) == Equivalence::Inequivalent);
  CHECK(sos::observe_equiv(T("letrec f = force f in force f"), T("prd 0"), 100) == Equivalence::Unknown);
  // thunks are opaque and stuck reasons are not observed
  CHECK(sos::observe_equiv(T("prd thunk { prd 1 }"), T("prd thunk { prd 2 }"), 10) == Equivalence::Equivalent);
  CHECK(sos::observe_equiv(T("force 1"), T("1 . prd 2"), 10) == Equivalence::Equivalent);
  CHECK(sos::observe_equiv(T("1 + 1"), T("prd 2"), 10) == Equivalence::Equivalent);
  CHECK(sos::observe_equiv(T("prd a"), T("prd b"), 10) == Equivalence::Inequivalent);
}

TEST_CASE("sos properties on generated terms") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    harness::GenOptions o;
    o.closed = seed % 3 != 0;
    o.ill_formed = seed % 3 == 0;
    auto m = harness::gen_term(seed, 25, o);
    CAPTURE(print(m));
    auto u = sos::unroll(m);
    CHECK(same(*sos::unroll(u), *u));

    auto a = sos::step(m), b = sos::step(m);
    REQUIRE(a.index() == b.index());
    if (a.index() == 0) CHECK(same(*std::get<sos::Next>(a).term, *std::get<sos::Next>(b).term));

    // redex depth is 0 exactly when a rule fires at the unrolled root
    auto d = sos::redex_depth(m);
    CHECK(d.has_value() == (a.index() == 0));
    bool root_rule = !u->is<App>() && !u->is<Seq>() && a.index() == 0;
    if (auto s = u->as<Seq>()) {
      auto l = sos::unroll(s->left);
      bool is_num_op = false;
      if (auto o = l->as<Op>())
        is_num_op = std::holds_alternative<NumV>(o->lhs) && std::holds_alternative<NumV>(o->rhs);
      root_rule = l->is<Prd>() || is_num_op;
    } else if (auto ap = u->as<App>()) {
      root_rule = sos::unroll(ap->body)->is<Lam>();
    }
    if (d) CHECK((*d == 0) == root_rule);
  }
}
