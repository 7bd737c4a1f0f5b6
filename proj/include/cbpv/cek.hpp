#pragma once

#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "cbpv/outcome.hpp"
#include "cbpv/plist.hpp"
#include "cbpv/term.hpp"

namespace cbpv::cek {

struct CekVal;
struct Frame;
using CekEnv = PList<Frame>;

struct SymVar {
  std::string name;
};
struct NumC {
  std::int64_t n;
};
struct Closure {
  TermPtr code;
  CekEnv env;
};
struct CekVal {
  std::variant<SymVar, NumC, Closure> v;
};

struct Bind {
  std::string name;
  CekVal value;
};
// The whole letrec node is kept; its definitions are the bundle.
struct RecFrame {
  TermPtr letrec;
};
struct Frame {
  std::variant<Bind, RecFrame> f;
};

struct ArgF {
  CekVal value;
};
struct SeqF {
  std::string binder;
  TermPtr rest;
  CekEnv env;
};
struct KFrame {
  std::variant<ArgF, SeqF> f;
};
using CekKont = PList<KFrame>;

struct CekState {
  TermPtr code;
  CekEnv env;
  CekKont kont;
};

struct Next {
  CekState state;
};
using StepResult = std::variant<Next, Terminal<CekVal>, Stuck>;

CekState load(const TermPtr& m);

// Unbound names evaluate to themselves as SymVar.
CekVal gamma(const Value& v, const CekEnv& e);

struct Descent {
  CekState state;
  std::size_t frames_pushed;
};
Descent descend(const CekState& s);
StepResult fire(const CekState& s);  // s must already be descended
StepResult step(const CekState& s);

TermPtr unload(const CekState& s);
Value unload_val(const CekVal& v);

// Every name used in code, closures and continuation frames is bound by
// the surrounding environment or listed in free_names.
bool wf_check(const CekState& s, const std::vector<std::string>& free_names);

// The same check, reusable across the states of one run: environments
// already checked are not walked again, so a run costs time linear in its
// length rather than quadratic.
class WfChecker {
 public:
  explicit WfChecker(const std::vector<std::string>& free_names);
  bool operator()(const CekState& s);

 private:
  bool env(const CekEnv& e);
  bool value(const CekVal& v);
  const std::set<std::string>& bound(const CekEnv& e);
  bool covered(const std::vector<std::string>& fv, const std::set<std::string>& names, const std::string& extra);

  std::set<std::string> free_;
  std::set<std::string> none_;
  std::vector<CekEnv> keep_;  // pins checked nodes so their addresses stay unique
  std::unordered_set<const void*> seen_;
  std::unordered_map<const void*, std::set<std::string>> bound_;
};

bool same(const CekVal& a, const CekVal& b);
bool same(const CekState& a, const CekState& b);
std::string print(const CekVal& v);
std::string print(const CekState& s);
std::string trace_line(std::size_t i, const CekState& s);

}  // namespace cbpv::cek
