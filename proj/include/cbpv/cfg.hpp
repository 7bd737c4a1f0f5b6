#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cbpv/pek.hpp"

namespace cbpv::cfg {

struct OVar {
  std::string name;
};
struct ONat {
  std::int64_t n;
};
struct OLoc {
  Path at;
};
struct OLbl {
  Path target;
};
using Operand = std::variant<OVar, ONat, OLoc, OLbl>;

struct Call {
  Operand fn;
  std::vector<Operand> args;  // innermost application first
  Path bind;
};
struct Tail {
  Operand fn;
  std::vector<Operand> args;
};
struct Mov {
  Operand src;
  Path dst;
};
struct Ret {
  Operand src;
};
struct Pop {
  Path dst;
};
struct IfZero {
  Operand guard;
  Path zero;
  Path nonzero;
};
struct Arith {
  Operand lhs;
  ArithOp op;
  Operand rhs;
  Path dst;
};
struct ArithRet {
  Operand lhs;
  ArithOp op;
  Operand rhs;
};
struct Halt {
  StuckReason reason;
};
using Instruction = std::variant<Call, Tail, Mov, Ret, Pop, IfZero, Arith, ArithRet, Halt>;

struct Block {
  Instruction ins;
  std::vector<Path> succ;
};

// Paths order lexicographically root-first, which is preorder, so the map
// iterates blocks in listing order.
struct Cfg {
  Path entry;
  std::map<Path, Block> blocks;
};

using State = pek::PekState;

// Deliberately broken variants, used to show the checks have teeth.
enum class Mutation { None, SwapIf0Targets, CallSavesCalleeEnv, ReverseArgOrder, EtaSkipsLetrec };
const char* to_string(Mutation m);

Operand operand_of(const Program& prog, const Path& p);
PVal eval_operand(const PEnv& e, const Operand& o);  // throws MissingBinding

Cfg compile(const Program& prog, Mutation m = Mutation::None);
pek::StepResult step(const Cfg& g, const State& s, Mutation m = Mutation::None);
std::pair<Cfg, State> load(const Program& prog);
TermPtr unload(const Program& prog, const State& s);

const char* mnemonic(const Instruction& ins);
std::string print_cfg(const Program& prog, const Cfg& g);
std::string print_records(const Program& prog, const Cfg& g);

// Canonical form of an expected listing: accepts ORET as a spelling of
// OPRET and CBR for IF0, strips trailing blanks and comment lines.
std::string normalize_listing(const std::string& text);

// Every path written anywhere in g.
std::set<Path> paths_mentioned(const Cfg& g);

std::string trace_line(std::size_t i, const Cfg& g, const State& s);

}  // namespace cbpv::cfg
