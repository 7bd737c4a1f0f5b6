#include "cbpv/error.hpp"
#include "cbpv/harness.hpp"
#include "cbpv/rewriter.hpp"
#include "cbpv/sos.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cbpv;
using testing::T;

namespace {

Path P(const char* s) { return Path::parse(s); }

std::vector<std::pair<RuleId, std::string>> redexes(const char* src) {
  std::vector<std::pair<RuleId, std::string>> out;
  for (const auto& r : find_redexes(T(src))) out.emplace_back(r.rule, r.at.str());
  return out;
}

using RList = std::vector<std::pair<RuleId, std::string>>;

}  // namespace

TEST_CASE("rule names") {
  for (RuleId r : all_rules()) CHECK(parse_rule(to_string(r)) == r);
  CHECK_FALSE(parse_rule("Nope").has_value());
  CHECK(all_rules().size() == 8);
}

TEST_CASE("find redexes") {
  CHECK(redexes("force thunk { prd 0 }") == RList{{RuleId::ForceThunk, "ε"}});
  CHECK(redexes("if0 x { prd 1 } { prd 1 }") == RList{{RuleId::BranchElim, "ε"}});
  CHECK(redexes("prd 0").empty());
  CHECK(redexes("if0 0 { prd 1 } { prd 2 }") == RList{{RuleId::DeadTrue, "ε"}});
  CHECK(redexes("if0 7 { prd 1 } { prd 2 }") == RList{{RuleId::DeadFalse, "ε"}});
  // the right-unit form of MoveElim also applies
  CHECK(redexes("1 + 2 to x in prd x") == RList{{RuleId::MoveElim, "ε"}, {RuleId::ConstFold, "ε"}});
  CHECK(redexes("1 + 2 to x in prd 0") == RList{{RuleId::ConstFold, "ε"}});
  CHECK(redexes("prd 1 to x in prd x") == RList{{RuleId::MoveElim, "ε"}});
  CHECK(redexes("5 . \\x. prd x") == RList{{RuleId::Beta, "ε"}});
  CHECK(redexes("thunk { \\y. prd y } . \\x. prd x") == RList{{RuleId::Beta, "ε"}, {RuleId::Inline, "ε"}});
  // the guard of if0 on a thunk is left alone
  CHECK(redexes("if0 thunk { prd 0 } { prd 1 } { prd 2 }").empty());
  // a redex inside a thunk body is found
  CHECK(redexes("prd thunk { force thunk { prd 0 } }") == RList{{RuleId::ForceThunk, "0.0"}});
}

TEST_CASE("apply rule") {
  CHECK(same(*apply_rule(testing::fixture("f2"), RuleId::ForceThunk, P("")), *T("prd 0")));
  CHECK(same(*apply_rule(testing::fixture("f1"), RuleId::ConstFold, P("")), *T("prd 3")));
  CHECK(same(*apply_rule(T("if0 0 { prd 1 } { prd 2 }"), RuleId::DeadTrue, P("")), *T("prd 1")));
  CHECK(same(*apply_rule(T("if0 3 { prd 1 } { prd 2 }"), RuleId::DeadFalse, P("")), *T("prd 2")));
  CHECK(same(*apply_rule(T("if0 x { prd 1 } { prd 1 }"), RuleId::BranchElim, P("")), *T("prd 1")));
  CHECK(same(*apply_rule(T("prd 4 to x in x + x"), RuleId::MoveElim, P("")), *T("4 + 4")));

  auto f9b = testing::fixture("f9b");
  auto inl = apply_rule(f9b, RuleId::Inline, P("0.0"));
  CHECK(alpha_eq(inl, T("force thunk { 2 . force thunk { \\a. a + a to x in prd x } to x in "
                        "3 . force thunk { \\a. a + a to x in prd x } to y in x + y to z in prd z }")));

  // substitution does not capture
  CHECK(alpha_eq(apply_rule(T("prd y to x in \\y. prd x"), RuleId::MoveElim, P("")), T("\\w. prd y")));

  CHECK_THROWS_AS(apply_rule(T("prd 0"), RuleId::ForceThunk, P("")), Error);
  CHECK_THROWS_AS(apply_rule(T("prd 0"), RuleId::ForceThunk, P("1")), Error);
}

TEST_CASE("optimize") {
  auto a = optimize(testing::fixture("f6"), {RuleId::ForceThunk});
  CHECK(same(*a.result, *testing::fixture("f7")));
  CHECK(a.log.size() == 2);
  CHECK(a.log[0].str() == "ForceThunk @ ε");

  auto b = optimize(testing::fixture("f7"), {RuleId::MoveElim});
  CHECK(same(*b.result, *testing::fixture("f8")));

  std::set<RuleId> all(all_rules().begin(), all_rules().end());
  auto c = optimize(T("prd 0"), all);
  CHECK(same(*c.result, *T("prd 0")));
  CHECK(c.log.empty());

  auto d = optimize(testing::fixture("f5_prime"), {RuleId::Beta}, 3);
  CHECK(d.log.size() <= 3);
}

TEST_CASE("validate") {
  CHECK(validate(testing::fixture("f2"), T("prd 0"), 100, {{}}).ok);

  Subst ab{{"a", NumV{2}}, {"b", NumV{3}}};
  auto r = validate(testing::fixture("f6"), testing::fixture("f8"), 100, {ab});
  CHECK(r.ok);
  REQUIRE(r.cases.size() == 1);
  CHECK(r.cases[0].sos == Equivalence::Equivalent);
  CHECK(r.cases[0].cfg == Equivalence::Equivalent);
  CHECK(r.cases[0].cfg_lhs.number == 5);
  CHECK(r.cases[0].cfg_rhs.number == 5);

  auto bad = validate(T("prd 0"), T("prd 1"), 10, {{}});
  CHECK_FALSE(bad.ok);
  CHECK_FALSE(bad.cases[0].problems.empty());

  // one side running out of fuel is not a pass
  auto half = validate(T("letrec f = force f in force f"), T("prd 0"), 50, {{}});
  CHECK_FALSE(half.ok);
  auto both = validate(T("letrec f = force f in force f"), T("letrec g = force g in force g"), 50, {{}});
  CHECK(both.ok);
  CHECK(both.cases[0].sos == Equivalence::Unknown);
}

TEST_CASE("logs replay and every step is sound") {
  std::set<RuleId> all(all_rules().begin(), all_rules().end());
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto m = harness::gen_term(seed, 25);
    CAPTURE(print(m));
    auto o = optimize(m, all, 50);
    TermPtr cur = m;
    for (const auto& s : o.log) {
      CHECK(same(*cur, *s.before));
      auto next = apply_rule(cur, s.rule, s.at);
      CHECK(same(*next, *s.after));
      CHECK(sos::observe_equiv(cur, next, 300) != Equivalence::Inequivalent);
      cur = next;
    }
    CHECK(same(*cur, *o.result));
  }
}

TEST_CASE("planted redexes are found and preserve meaning") {
  for (RuleId r : all_rules()) {
    CAPTURE(to_string(r));
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
      harness::GenOptions o;
      o.plant = r;
      auto m = harness::gen_term(seed, 20, o);
      bool found = false;
      for (const auto& x : find_redexes(m)) {
        if (x.rule != r) continue;
        found = true;
        auto after = apply_rule(m, r, x.at);
        auto v = validate(m, after, 300, {{}});
        CHECK_MESSAGE(v.ok, v.str());
      }
      CHECK(found);
    }
  }
}
