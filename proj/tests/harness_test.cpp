#include "cbpv/harness.hpp"
#include "cbpv/run.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cbpv;
using namespace cbpv::harness;
using testing::T;

TEST_CASE("lockstep examples") {
  auto f1 = testing::fixture("f1");
  auto r = lockstep_check(f1, LevelPair::PekCfg, 100);
  CHECK(r.pass());
  CHECK(r.finished);
  CHECK(r.steps_checked == 1);  // one transition, then the terminal
  CHECK(lockstep_check(testing::fixture("f5_prime"), LevelPair::SosCek, 500).pass());
  for (auto pair : {LevelPair::SosCek, LevelPair::CekPeak, LevelPair::PeakPek, LevelPair::PekCfg}) {
    CAPTURE(to_string(pair));
    for (auto name : testing::kFixtures) {
      CAPTURE(name);
      CHECK(lockstep_check(testing::fixture(name), pair, 500).pass());
    }
  }
  CHECK(lockstep_check(testing::fixture("f5_prime"), LevelPair::PeakPek, 500, Mode::ModuloAdvance).pass());
}

TEST_CASE("a swapped branch is caught at the first step") {
  auto r = lockstep_check(testing::fixture("f4"), LevelPair::PekCfg, 100, Mode::Strict,
                          cfg::Mutation::SwapIf0Targets);
  REQUIRE_FALSE(r.pass());
  CHECK(r.failure->step == 1);
  CHECK(r.failure->level == "PEK_CFG");
  CHECK(r.str().find("PEK_CFG") != std::string::npos);
}

TEST_CASE("every mutation is caught on the fixtures") {
  for (auto mut : {cfg::Mutation::SwapIf0Targets, cfg::Mutation::CallSavesCalleeEnv,
                   cfg::Mutation::ReverseArgOrder, cfg::Mutation::EtaSkipsLetrec}) {
    CAPTURE(cfg::to_string(mut));
    bool caught = false;
    for (auto name : testing::kFixtures) {
      auto m = testing::fixture(name);
      caught = caught || !lockstep_check(m, LevelPair::PekCfg, 500, Mode::Strict, mut).pass() ||
               !cfg_sos_check(m, 500, mut).pass();
    }
    CHECK(caught);
  }
}

TEST_CASE("CFG against SOS examples") {
  CHECK(cfg_sos_check(testing::fixture("f1"), 100).pass());
  auto r = cfg_sos_check(testing::fixture("f5_prime"), 2000);
  CHECK(r.pass());
  CHECK(r.finished);
  CHECK(r.answer.kind == Observation::Kind::Number);
  CHECK(r.answer.number == 4);
  auto s = cfg_sos_check(T("1 . prd 2"), 10);
  CHECK(s.pass());
  CHECK(s.steps_checked == 0);
  CHECK(s.answer.kind == Observation::Kind::Stuck);
}

TEST_CASE("other checks on the fixtures") {
  for (auto name : testing::kFixtures) {
    CAPTURE(name);
    auto m = testing::fixture(name);
    CHECK(roundtrip_check(m).pass());
    CHECK(path_check(m, 500).pass());
    CHECK(stuck_alignment_check(m, 500).pass());
  }
}

TEST_CASE("duplicate names in a letrec bundle resolve leftmost at every level") {
  auto m = T("letrec x = prd 2 and x = prd thunk { prd 42 } to x in \\z. force x in 1 . force x");
  CHECK(run_machine(Machine::Sos, m, 100).obs.kind == Observation::Kind::Stuck);
  CHECK(cfg_sos_check(m, 100).pass());
  for (auto pair : {LevelPair::SosCek, LevelPair::CekPeak, LevelPair::PeakPek, LevelPair::PekCfg})
    CHECK(lockstep_check(m, pair, 100).pass());
  auto n = T("letrec f = prd 1 and f = prd 2 in force f");
  for (auto k : {Machine::Sos, Machine::Cek, Machine::Peak, Machine::Pek, Machine::Cfg})
    CHECK(run_machine(k, n, 100).obs.number == 1);
}

TEST_CASE("generated closed terms never get stuck") {
  for (std::uint64_t s = 0; s < 5000; ++s) {
    auto m = gen_term(s, 25);
    CAPTURE(print(m));
    CHECK(run_machine(Machine::Cfg, m, 300).obs.kind != Observation::Kind::Stuck);
  }
}

TEST_CASE("diverging programs are checked up to fuel") {
  auto m = T("letrec f = force f in force f");
  auto r = cfg_sos_check(m, 40);
  CHECK(r.pass());
  CHECK_FALSE(r.finished);
  CHECK(r.steps_checked == 40);
}

TEST_CASE("generator") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto z = gen_term(s, 0);
    REQUIRE(z->is<Prd>());
    CHECK(std::holds_alternative<NumV>(z->as<Prd>()->v));
  }
  for (std::uint64_t s = 0; s < 500; ++s) {
    auto a = gen_term(s, 25);
    CHECK(free_vars(*a).empty());
    CHECK(a->size <= 25);
    CHECK(same(*a, *gen_term(s, 25)));
  }
  // open terms do use free names sometimes
  bool open = false;
  for (std::uint64_t s = 0; s < 200 && !open; ++s) {
    GenOptions o;
    o.closed = false;
    open = !free_vars(*gen_term(s, 25, o)).empty();
  }
  CHECK(open);
}

TEST_CASE("all machines give the same answers") {
  for (auto name : testing::kFixtures) {
    CAPTURE(name);
    auto m = testing::fixture(name);
    auto ref = run_machine(Machine::Sos, m, 1000);
    for (auto k : {Machine::Cek, Machine::Peak, Machine::Pek, Machine::Cfg}) {
      CAPTURE(to_string(k));
      auto r = run_machine(k, m, 1000);
      CHECK(r.obs == ref.obs);
      CHECK(alpha_eq(r.residual, ref.residual));
    }
  }
  auto t = run_machine(Machine::Cfg, testing::fixture("f1"), 100, true);
  CHECK(t.trace.size() == 2);
}
