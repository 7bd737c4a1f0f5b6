// Acceptance suite: one PASS/FAIL line per criterion; exits 1 if any fail.

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

#include "cbpv/cfg.hpp"
#include "cbpv/harness.hpp"
#include "cbpv/peak.hpp"
#include "cbpv/pek.hpp"
#include "cbpv/rewriter.hpp"
#include "cbpv/run.hpp"
#include "support.hpp"

using namespace cbpv;
using namespace cbpv::harness;

namespace {

constexpr std::size_t kGenerated = 1000;
constexpr std::size_t kSize = 25;
constexpr std::size_t kFuel = 300;

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool ok = true;
  std::string detail;
  void fail(const std::string& why) {
    if (ok) detail = why;  // keep the first
    ok = false;
  }
};

int failures = 0;

void criterion(int n, const char* title, double limit_s, const std::function<Outcome()>& body) {
  auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.fail(std::string("exception: ") + e.what());
  }
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (limit_s > 0 && secs >= limit_s) {
    std::ostringstream s;
    s << "took " << secs << " s, limit " << limit_s << " s";
    o.fail(s.str());
  }
  std::printf("%s %2d  %s (%.2f s)%s%s\n", o.ok ? "PASS" : "FAIL", n, title, secs,
              o.detail.empty() ? "" : ": ", o.detail.c_str());
  std::fflush(stdout);
  if (!o.ok) ++failures;
}

std::vector<std::pair<std::string, TermPtr>> corpus() {
  std::vector<std::pair<std::string, TermPtr>> out;
  for (auto name : testing::kFixtures) out.emplace_back(name, testing::fixture(name));
  for (std::uint64_t s = 0; s < kGenerated; ++s) out.emplace_back("seed " + std::to_string(s), gen_term(s, kSize));
  return out;
}

// The mult program applied to (n, m, a).
TermPtr mult_call(std::int64_t n, std::int64_t m, std::int64_t a) {
  std::string src = testing::read_file(std::string(FIXTURE_DIR) + "/f5.cbpv");
  auto at = src.rfind("prd mult");
  src.replace(at, 8, std::to_string(a) + " . " + std::to_string(m) + " . " + std::to_string(n) + " . force mult");
  return testing::T(src);
}

Observation answer(const TermPtr& m, std::size_t fuel, Machine k = Machine::Cfg) {
  return run_machine(k, m, fuel).obs;
}

// Every state reached from load at the three path-based levels satisfies
// its well-formedness predicate. Returns the number of states visited.
std::size_t wf_walk(const TermPtr& m, std::size_t fuel, Outcome& o, const std::string& label) {
  Program prog(m);
  std::size_t visited = 0;
  {
    auto s = peak::load(prog);
    for (std::size_t i = 0; i <= fuel; ++i, ++visited) {
      auto w = peak::wf_check(prog, s);
      if (!w.ok) o.fail(label + ": peak state " + std::to_string(i) + " " + w.violations.front());
      auto r = peak::step(prog, s);
      if (auto n = std::get_if<peak::Next>(&r)) s = n->state;
      else break;
    }
  }
  {
    auto s = pek::load(prog);
    for (std::size_t i = 0; i <= fuel; ++i, ++visited) {
      auto w = pek::wf_check(prog, s);
      if (!w.ok) o.fail(label + ": pek state " + std::to_string(i) + " " + w.violations.front());
      auto r = pek::step(prog, s);
      if (auto n = std::get_if<pek::Next>(&r)) s = n->state;
      else break;
    }
  }
  {
    auto [g, s] = cfg::load(prog);
    for (std::size_t i = 0; i <= fuel; ++i, ++visited) {
      auto w = pek::wf_check(prog, s);
      if (!w.ok) o.fail(label + ": cfg state " + std::to_string(i) + " " + w.violations.front());
      auto r = cfg::step(g, s);
      if (auto n = std::get_if<pek::Next>(&r)) s = n->state;
      else break;
    }
  }
  return visited;
}

}  // namespace

int main() {
  const auto all = corpus();
  const Machine machines[] = {Machine::Sos, Machine::Cek, Machine::Peak, Machine::Pek, Machine::Cfg};

  criterion(1, "mult program answers n*(m-1)+a on every machine", 1.0, [&] {
    Outcome o;
    auto expect4 = testing::T("prd 4");
    for (auto k : machines) {
      auto r = run_machine(k, testing::fixture("f5_prime"), 10000);
      if (!(r.obs.kind == Observation::Kind::Number && r.obs.number == 4) || !alpha_eq(r.residual, expect4))
        o.fail(std::string(to_string(k)) + " gave " + r.obs.str());
    }
    struct Triple {
      std::int64_t n, m, a, want;
    };
    for (auto t : {Triple{1, 1, 0, 0}, Triple{3, 4, 5, 14}, Triple{0, 2, 9, 9}, Triple{2, 3, 0, 4}}) {
      auto prog = mult_call(t.n, t.m, t.a);
      for (auto k : machines) {
        auto r = run_machine(k, prog, 10000);
        if (!(r.obs.kind == Observation::Kind::Number && r.obs.number == t.want))
          o.fail(std::string(to_string(k)) + " on (" + std::to_string(t.n) + "," + std::to_string(t.m) + "," +
                 std::to_string(t.a) + ") gave " + r.obs.str());
      }
    }
    return o;
  });

  criterion(2, "mult program CFG listing matches the golden file", 0, [&] {
    Outcome o;
    Program f5(testing::fixture("f5"));
    auto g = cfg::compile(f5);
    auto text = cfg::print_cfg(f5, g);
    if (g.blocks.size() != 11) o.fail(std::to_string(g.blocks.size()) + " instructions");
    std::multiset<std::string> ms;
    for (auto& [p, b] : g.blocks) ms.insert(cfg::mnemonic(b.ins));
    std::multiset<std::string> want{"RET", "RET", "RET", "POP", "POP", "POP", "IF0", "IF0", "OP", "OP", "TAIL"};
    if (ms != want) o.fail("mnemonic multiset differs");
    if (text.substr(0, text.find('\n')) != "0: RET @1 []") o.fail("line 0 is " + text.substr(0, text.find('\n')));
    auto golden = testing::read_file(std::string(GOLDEN_DIR) + "/f5.cfg");
    if (text != golden) o.fail("not byte-identical to golden");
    return o;
  });

  criterion(3, "force/thunk then move elimination chain, all answer 5", 0, [&] {
    Outcome o;
    auto f6 = testing::fixture("f6"), f7 = testing::fixture("f7"), f8 = testing::fixture("f8");
    auto a = optimize(f6, {RuleId::ForceThunk});
    if (!alpha_eq(a.result, f7)) o.fail("ForceThunk gave " + print(a.result));
    auto b = optimize(f7, {RuleId::MoveElim});
    if (!alpha_eq(b.result, f8)) o.fail("MoveElim gave " + print(b.result));
    Subst ab{{"a", NumV{2}}, {"b", NumV{3}}};
    for (auto& m : {f6, f7, f8}) {
      auto closed = substitute(m, ab);
      for (auto k : machines) {
        auto obs = answer(closed, 100, k);
        if (!(obs.kind == Observation::Kind::Number && obs.number == 5))
          o.fail(print(m) + " on " + to_string(k) + " gave " + obs.str());
      }
    }
    auto v = validate(f6, f8, 100, {ab});
    if (!v.ok) o.fail(v.str());
    return o;
  });

  criterion(4, "a + b compiles to a single OPRET", 0, [&] {
    Outcome o;
    Program p(testing::T("a + b"));
    auto text = cfg::print_cfg(p, cfg::compile(p));
    if (text != "0: OPRET ADD a b []\n") o.fail("got " + text);
    return o;
  });

  criterion(5, "CFG steps commute with the SOS on fixtures and 1000 generated terms", 60.0, [&] {
    Outcome o;
    for (auto& [label, m] : all) {
      auto r = cfg_sos_check(m, kFuel);
      if (!r.pass()) o.fail(label + ": " + r.str());
    }
    return o;
  });

  criterion(6, "lockstep at each adjacent pair of machines", 120.0, [&] {
    Outcome o;
    for (auto pair : {LevelPair::SosCek, LevelPair::CekPeak, LevelPair::PeakPek, LevelPair::PekCfg}) {
      Mode mode = pair == LevelPair::PeakPek ? Mode::ModuloAdvance : Mode::Strict;
      for (auto& [label, m] : all) {
        auto r = lockstep_check(m, pair, kFuel, mode);
        if (!r.pass()) o.fail(label + ": " + r.str());
      }
    }
    return o;
  });

  criterion(7, "unload after load is the identity at every level", 0, [&] {
    Outcome o;
    for (auto& [label, m] : all) {
      auto r = roundtrip_check(m);
      if (!r.pass()) o.fail(label + ": " + r.str());
    }
    return o;
  });

  criterion(8, "every visited PEAK, PEK and CFG state is well-formed", 0, [&] {
    Outcome o;
    std::size_t visited = 0;
    for (auto& [label, m] : all) visited += wf_walk(m, kFuel, o, label);
    if (o.ok) o.detail = std::to_string(visited) + " states";
    return o;
  });

  criterion(9, "SOS and CFG get stuck at the same residual on 200 open ill-formed terms", 0, [&] {
    Outcome o;
    std::size_t stuck = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
      GenOptions g;
      g.closed = false;
      g.ill_formed = true;
      auto m = gen_term(s, kSize, g);
      auto r = stuck_alignment_check(m, kFuel);
      if (!r.pass()) o.fail("seed " + std::to_string(s) + ": " + r.str());
      if (r.finished && r.answer.kind == Observation::Kind::Stuck) ++stuck;
    }
    if (stuck == 0) o.fail("no generated term got stuck");
    if (o.ok) o.detail = std::to_string(stuck) + " stuck";
    return o;
  });

  criterion(10, "every rewrite rule preserves meaning on 500 instances", 0, [&] {
    Outcome o;
    for (RuleId rule : all_rules()) {
      std::size_t unknown = 0;
      for (std::uint64_t s = 0; s < 500; ++s) {
        GenOptions g;
        g.plant = rule;
        auto m = gen_term(s, kSize, g);
        std::optional<Path> at;
        for (const auto& r : find_redexes(m))
          if (r.rule == rule) {
            at = r.at;
            break;
          }
        if (!at) {
          o.fail(std::string(to_string(rule)) + " seed " + std::to_string(s) + ": no instance");
          continue;
        }
        auto v = validate(m, apply_rule(m, rule, *at), kFuel, {{}});
        if (!v.ok) o.fail(std::string(to_string(rule)) + " seed " + std::to_string(s) + ": " + v.str());
        for (const auto& c : v.cases) {
          bool sos_both_out = c.sos_lhs.kind == Observation::Kind::OutOfFuel &&
                              c.sos_rhs.kind == Observation::Kind::OutOfFuel;
          bool cfg_both_out = c.cfg_lhs.kind == Observation::Kind::OutOfFuel &&
                              c.cfg_rhs.kind == Observation::Kind::OutOfFuel;
          if (c.sos == Equivalence::Inequivalent || c.cfg == Equivalence::Inequivalent)
            o.fail(std::string(to_string(rule)) + " seed " + std::to_string(s) + ": inequivalent");
          if ((c.sos == Equivalence::Unknown && !sos_both_out) || (c.cfg == Equivalence::Unknown && !cfg_both_out))
            o.fail(std::string(to_string(rule)) + " seed " + std::to_string(s) + ": one-sided fuel exhaustion");
          if (c.sos == Equivalence::Unknown) ++unknown;
        }
      }
      if (o.ok && unknown) o.detail += std::string(o.detail.empty() ? "" : ", ") + to_string(rule) + ": " +
                                       std::to_string(unknown) + " both out of fuel";
    }
    return o;
  });

  criterion(11, "each compiler mutation is caught", 0, [&] {
    Outcome o;
    for (auto mut : {cfg::Mutation::SwapIf0Targets, cfg::Mutation::CallSavesCalleeEnv,
                     cfg::Mutation::ReverseArgOrder, cfg::Mutation::EtaSkipsLetrec}) {
      std::size_t caught = 0;
      for (auto name : testing::kFixtures) {
        auto m = testing::fixture(name);
        if (!lockstep_check(m, LevelPair::PekCfg, kFuel, Mode::Strict, mut).pass()) ++caught;
        if (!cfg_sos_check(m, kFuel, mut).pass()) ++caught;
      }
      if (caught == 0) o.fail(std::string(cfg::to_string(mut)) + " not detected");
    }
    return o;
  });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
