#include "cbpv/cek.hpp"
#include "cbpv/error.hpp"
#include "cbpv/harness.hpp"
#include "cbpv/peak.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cbpv;
using namespace cbpv::peak;
using testing::T;

namespace {

Path P(const char* s) { return Path::parse(s); }
PVal num(std::int64_t n) { return {NumP{n}}; }

PeakState next(const Program& prog, const PeakState& s) {
  auto r = step(prog, s);
  REQUIRE(std::holds_alternative<Next>(r));
  return std::get<Next>(r).state;
}

std::vector<AFrame> args_of(const PeakState& s) { return s.args.to_vector(); }

}  // namespace

TEST_CASE("lookup and gamma") {
  Program f5(testing::fixture("f5"));
  PEnv e = PEnv{}.set(P("1"), num(2)).set(P("1.0"), num(3)).set(P("1.0.0"), num(0));
  CHECK(std::get<NumP>(lookup_var(f5, P("1.0.0.0.0"), e).v).n == 3);

  auto mult = lookup_var(f5, P("1.0.0.0.2.1.2.1.1.1.1.0"), e);
  REQUIRE(std::holds_alternative<PClosure>(mult.v));
  CHECK(std::get<PClosure>(mult.v).entry == P("1"));
  CHECK(std::get<PClosure>(mult.v).env.id() == e.id());

  Program f6(testing::fixture("f6"));
  CHECK(std::get<SymVar>(lookup_var(f6, P("0.0.0.0.0.0.0"), {}).v).name == "a");

  // the 1 in x - 1
  CHECK(std::get<NumP>(gamma(f5, P("1.0.0.0.2.0.1"), e).v).n == 1);
  Program f2(testing::fixture("f2"));
  auto th = gamma(f2, P("0"), e);
  CHECK(std::get<PClosure>(th.v).entry == P("0.0"));

  CHECK_THROWS_AS(lookup_var(f5, P("1.0.0.0.0"), PEnv{}), Error);
}

TEST_CASE("delta stops at the first SEQ") {
  Program prog(T("7 . ((5 . force thunk { \\y. prd y }) to x in prd x)"));
  auto s = advance(prog, load(prog));
  CHECK(s.pc == P("1.0.1"));
  REQUIRE(args_of(s) == std::vector<AFrame>{{AFrame::Kind::Arg, P("1.0")},
                                            {AFrame::Kind::Seq, P("1")},
                                            {AFrame::Kind::Arg, P("")}});
  CHECK(delta(prog, s.env, Args{}).empty());
  auto d = delta(prog, s.env, s.args);
  REQUIRE(d.size() == 2);
  CHECK(std::get<NumP>(std::get<KArg>(d[0].f).v.v).n == 5);
  const auto& ks = std::get<KSeq>(d[1].f);
  CHECK(ks.at == P("1"));
  CHECK(ks.args.to_vector() == std::vector<AFrame>{{AFrame::Kind::Arg, P("")}});
}

TEST_CASE("advance") {
  Program prd(T("prd 0"));
  CHECK(advance(prd, load(prd)).pc.empty());

  Program f1(testing::fixture("f1"));
  auto a = advance(f1, load(f1));
  CHECK(a.pc == P("0"));
  CHECK(args_of(a) == std::vector<AFrame>{{AFrame::Kind::Seq, P("")}});

  Program f5p(testing::fixture("f5_prime"));
  auto b = advance(f5p, load(f5p));
  CHECK(b.pc == P("0.1.1.1"));
  CHECK(args_of(b) == std::vector<AFrame>{{AFrame::Kind::Arg, P("0.1.1")},
                                          {AFrame::Kind::Arg, P("0.1")},
                                          {AFrame::Kind::Arg, P("0")}});
  auto c = advance(f5p, b);
  CHECK(same(b, c));
}

TEST_CASE("step") {
  Program f2(testing::fixture("f2"));
  auto s = next(f2, load(f2));
  CHECK(s.pc == P("0.0"));
  CHECK(s.args.empty());
  CHECK(s.kont.empty());

  Program f1(testing::fixture("f1"));
  auto t = next(f1, load(f1));
  CHECK(t.pc == P("1"));
  CHECK(std::get<NumP>(t.env.find(P(""))->v).n == 3);
  auto fin = step(f1, t);
  REQUIRE(std::holds_alternative<Terminal<PVal>>(fin));
  CHECK(std::get<NumP>(std::get<Terminal<PVal>>(fin).value->v).n == 3);

  Program lam(T("\\x. prd x"));
  PeakState w{P(""), {}, {}, Kont{}.push({KArg{num(5)}})};
  auto u = next(lam, w);
  CHECK(u.pc == P("0"));
  CHECK(std::get<NumP>(u.env.find(P(""))->v).n == 5);
  CHECK(u.kont.empty());

  Program bad(T("1 . prd 2"));
  CHECK(std::holds_alternative<Stuck>(step(bad, load(bad))));
}

TEST_CASE("unload") {
  Program f1(testing::fixture("f1"));
  auto c0 = unload(f1, load(f1));
  CHECK(same(*c0.code, *f1.root()));
  auto c1 = unload(f1, next(f1, load(f1)));
  CHECK(same(*c1.code, *T("prd x")));
  CHECK(std::get<cek::NumC>(cek::gamma(build::var("x"), c1.env).v).n == 3);

  Program app(T("5 . \\x. prd x"));
  PeakState s{P("1"), {}, Args{}.push({AFrame::Kind::Arg, P("")}), {}};
  auto c = unload(app, s);
  REQUIRE(c.kont.size() == 1);
  CHECK(std::get<cek::NumC>(std::get<cek::ArgF>(c.kont.top().f).value.v).n == 5);

  for (auto name : testing::kFixtures) {
    Program prog(testing::fixture(name));
    CHECK(alpha_eq(cek::unload(unload(prog, load(prog))), prog.root()));
  }
}

TEST_CASE("well-formedness") {
  Program f5(testing::fixture("f5"));
  CHECK(wf_check(f5, load(f5)).ok);

  Program app(T("5 . \\x. prd x"));
  PeakState off{P("1"), {}, Args{}.push({AFrame::Kind::Arg, P("1")}), {}};
  CHECK_FALSE(wf_check(app, off).ok);  // the frame's path does not enclose pc
  PeakState unbound{P("1.0"), {}, {}, {}};
  CHECK_FALSE(wf_check(app, unbound).ok);  // x has no value
  CHECK(missing_binders(app, P("1.0"), {}) == std::vector<Path>{P("1")});
}

TEST_CASE("environment snapshots are isolated") {
  PEnv e = PEnv{}.set(P("0"), num(1));
  PVal clo{PClosure{P("1"), e}};
  PEnv e2 = e.set(P("0"), num(2));
  CHECK(std::get<NumP>(std::get<PClosure>(clo.v).env.find(P("0"))->v).n == 1);
  CHECK(std::get<NumP>(e2.find(P("0"))->v).n == 2);
}

TEST_CASE("reachable states stay well-formed; advance is idempotent and pure") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Program prog(harness::gen_term(seed, 25));
    PeakState s = load(prog);
    for (int k = 0; k < 100; ++k) {
      auto w = wf_check(prog, s);
      CHECK(w.ok);
      auto a = advance(prog, s);
      CHECK(same(advance(prog, a), a));
      CHECK(a.env.id() == s.env.id());
      CHECK(a.kont.id() == s.kont.id());
      // frames pushed by advance name exactly the nodes passed, innermost first
      auto pushed = a.args.size() - s.args.size();
      Path at = a.pc;
      auto it = a.args.begin();
      for (std::size_t i = 0; i < pushed; ++i, ++it) {
        CHECK(it->at.encloses(at));
        CHECK(is_search(prog.computation(it->at)));
        at = it->at;
      }
      auto r = step(prog, s);
      if (r.index() != 0) break;
      s = std::get<Next>(r).state;
    }
  }
}

TEST_CASE("trace line") {
  Program f1(testing::fixture("f1"));
  auto a = advance(f1, load(f1));
  CHECK(trace_line(3, a) == "peak 3: pc=0 env=0 args=[SEQ ε] kont=0");
}
