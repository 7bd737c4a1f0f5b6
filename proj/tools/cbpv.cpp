// cbpv: run, compile, unload, optimize and check CBPV programs.
//
// Exit codes: 0 ok, 1 program stuck, 2 fuel exhausted, 3 check failure,
// 64 usage or syntax error.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cbpv/cfg.hpp"
#include "cbpv/error.hpp"
#include "cbpv/harness.hpp"
#include "cbpv/parse.hpp"
#include "cbpv/rewriter.hpp"
#include "cbpv/run.hpp"

using namespace cbpv;

namespace {

constexpr int kOk = 0, kStuck = 1, kFuel = 2, kCheckFailed = 3, kUsage = 64;

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

TermPtr load_file(const std::string& path) {
  std::stringstream ss;
  if (path == "-") {
    ss << std::cin.rdbuf();
  } else {
    std::ifstream in(path);
    if (!in) throw Usage("cannot open " + path);
    ss << in.rdbuf();
  }
  try {
    return parse_source(ss.str());
  } catch (const SyntaxError& e) {
    throw Usage(path + ":" + e.what());
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

Subst parse_valuation(const std::string& s) {
  Subst out;
  for (const auto& item : split(s, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw Usage("bad valuation entry '" + item + "'");
    try {
      std::size_t used = 0;
      long long n = std::stoll(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument(item);
      out[item.substr(0, eq)] = NumV{n};
    } catch (const std::logic_error&) {
      throw Usage("bad valuation entry '" + item + "'");
    }
  }
  return out;
}

std::set<RuleId> parse_rules(const std::string& s) {
  std::set<RuleId> out;
  if (s.empty() || s == "all") return {all_rules().begin(), all_rules().end()};
  for (const auto& name : split(s, ',')) {
    auto r = parse_rule(name);
    if (!r) throw Usage("unknown rule '" + name + "'");
    out.insert(*r);
  }
  return out;
}

int exit_for(const Observation& o) {
  if (o.kind == Observation::Kind::Stuck) return kStuck;
  if (o.kind == Observation::Kind::OutOfFuel) return kFuel;
  return kOk;
}

void print_result(const Observation& o) {
  if (o.kind == Observation::Kind::Stuck)
    std::cout << "stuck: " << to_string(o.reason) << "\n";
  else if (o.kind == Observation::Kind::OutOfFuel)
    std::cout << "fuel exhausted\n";
  else
    std::cout << "result: " << o.str() << "\n";
}

struct Options {
  std::string file;
  std::vector<std::string> files;
  std::string machine = "cfg";
  std::size_t fuel = 10000;
  bool trace = false;
  std::string emit = "cfg";
  std::string rules;
  std::string valuation;
  std::size_t steps = 0;
  std::uint64_t seed = 0;
  std::size_t count = 0;
  std::size_t size = 25;
  bool modulo_advance = false;
  bool all = false;
};

int cmd_run(const Options& o) {
  Machine k;
  if (!parse_machine(o.machine, k)) throw Usage("unknown machine '" + o.machine + "'");
  auto m = load_file(o.file);
  if (!o.valuation.empty()) m = substitute(m, parse_valuation(o.valuation));
  auto r = run_machine(k, m, o.fuel, o.trace);
  for (const auto& line : r.trace) std::cout << line << "\n";
  print_result(r.obs);
  if (r.obs.kind == Observation::Kind::Stuck) std::cout << "residual: " << print(r.residual) << "\n";
  return exit_for(r.obs);
}

int cmd_compile(const Options& o) {
  Program prog(load_file(o.file));
  auto g = cfg::compile(prog);
  if (o.emit == "cfg")
    std::cout << cfg::print_cfg(prog, g);
  else if (o.emit == "records")
    std::cout << cfg::print_records(prog, g);
  else
    throw Usage("unknown --emit '" + o.emit + "'");
  return kOk;
}

// Runs --steps CFG steps and prints the residual term.
int cmd_unload(const Options& o) {
  auto m = load_file(o.file);
  if (!o.valuation.empty()) m = substitute(m, parse_valuation(o.valuation));
  auto r = run_machine(Machine::Cfg, m, o.steps, o.trace);
  for (const auto& line : r.trace) std::cout << line << "\n";
  std::cout << print(r.residual) << "\n";
  return kOk;
}

int cmd_optimize(const Options& o) {
  auto m = load_file(o.file);
  auto rules = parse_rules(o.rules);
  auto opt = optimize(m, rules);
  for (const auto& s : opt.log) std::cout << s.str() << "\n";
  std::cout << print(opt.result) << "\n";
  std::vector<Subst> vals{o.valuation.empty() ? Subst{} : parse_valuation(o.valuation)};
  auto v = validate(m, opt.result, o.fuel, vals);
  if (!v.ok) {
    std::cerr << v.str();
    return kCheckFailed;
  }
  return kOk;
}

int cmd_check(const Options& o) {
  using namespace harness;
  std::size_t fuel = o.fuel;
  std::vector<std::pair<std::string, TermPtr>> progs;
  for (const auto& f : o.files) progs.emplace_back(f, load_file(f));
  for (std::size_t i = 0; i < o.count; ++i)
    progs.emplace_back("seed " + std::to_string(o.seed + i), gen_term(o.seed + i, o.size));
  if (progs.empty()) throw Usage("nothing to check: give files or --count");

  Mode mode = o.modulo_advance ? Mode::ModuloAdvance : Mode::Strict;
  std::size_t failed = 0, checks = 0;
  auto record = [&](const std::string& label, const std::string& what, const Report& r) {
    ++checks;
    if (r.pass()) return;
    ++failed;
    std::cout << label << " " << what << ": " << r.str() << "\n";
  };
  for (const auto& [label, m] : progs) {
    record(label, "CFG_SOS", cfg_sos_check(m, fuel));
    if (!o.all) continue;
    for (auto pair : {LevelPair::SosCek, LevelPair::CekPeak, LevelPair::PeakPek, LevelPair::PekCfg})
      record(label, to_string(pair), lockstep_check(m, pair, fuel, mode));
    record(label, "ROUNDTRIP", roundtrip_check(m));
    record(label, "PATHS", path_check(m, fuel));
    record(label, "STUCK", stuck_alignment_check(m, fuel));
  }
  std::cout << progs.size() << " programs, " << checks << " checks, " << failed << " failed\n";
  return failed ? kCheckFailed : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Call-by-push-value machines, CFG compiler and optimizer"};
  app.require_subcommand(1);
  Options o;

  auto fuel_opt = [&](CLI::App* c) {
    c->add_option("--fuel", o.fuel, "step budget")->capture_default_str();
  };

  auto* run = app.add_subcommand("run", "run a program on one machine");
  run->add_option("file", o.file, "source file, - for stdin")->required();
  run->add_option("--machine", o.machine, "sos, cek, peak, pek or cfg")
      ->check(CLI::IsMember({"sos", "cek", "peak", "pek", "cfg"}));
  fuel_opt(run);
  run->add_flag("--trace", o.trace, "print every visited state");
  run->add_option("--valuation", o.valuation, "close free names, e.g. a=2,b=3");

  auto* comp = app.add_subcommand("compile", "print the compiled CFG");
  comp->add_option("file", o.file)->required();
  comp->add_option("--emit", o.emit, "cfg or records")->check(CLI::IsMember({"cfg", "records"}));

  auto* unl = app.add_subcommand("unload", "run some CFG steps and print the residual term");
  unl->add_option("file", o.file)->required();
  unl->add_option("--steps", o.steps, "CFG steps to take")->required();
  unl->add_flag("--trace", o.trace);
  unl->add_option("--valuation", o.valuation);

  auto* opt = app.add_subcommand("optimize", "rewrite to a fixpoint and validate the result");
  opt->add_option("file", o.file)->required();
  opt->add_option("--rules", o.rules, "comma-separated rule names, default all");
  opt->add_option("--valuation", o.valuation);
  fuel_opt(opt);

  auto* chk = app.add_subcommand("check", "differential checks across the machines");
  chk->add_option("files", o.files);
  chk->add_flag("--all", o.all, "every check, not only CFG against SOS");
  chk->add_option("--seed", o.seed, "first generator seed");
  chk->add_option("--count", o.count, "generated programs to add");
  chk->add_option("--size", o.size, "generated program size bound");
  chk->add_flag("--modulo-advance", o.modulo_advance, "compare PEAK and PEK after advancing");
  fuel_opt(chk);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(o);
    if (*comp) return cmd_compile(o);
    if (*unl) return cmd_unload(o);
    if (*opt) return cmd_optimize(o);
    return cmd_check(o);
  } catch (const Usage& e) {
    std::cerr << "cbpv: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "cbpv: " << e.what() << "\n";
    return kUsage;
  }
}
