#include "cbpv/cfg.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

namespace cbpv::cfg {

const char* to_string(Mutation m) {
  switch (m) {
    case Mutation::None: return "none";
    case Mutation::SwapIf0Targets: return "swap-if0-targets";
    case Mutation::CallSavesCalleeEnv: return "call-saves-callee-env";
    case Mutation::ReverseArgOrder: return "reverse-arg-order";
    case Mutation::EtaSkipsLetrec: return "eta-skips-letrec";
  }
  return "?";
}

namespace {

using EtaFn = std::function<Path(const Path&)>;

// eta that stops at letrec nodes; only used by the EtaSkipsLetrec mutation
Path eta_no_letrec(const Program& prog, const Path& start) {
  Path p = start;
  for (;;) {
    const Term& t = prog.computation(p);
    if (t.is<Seq>()) p = p.child(0);
    else if (t.is<App>()) p = p.child(1);
    else return p;
  }
}

Operand operand_with(const Program& prog, const Path& p, const EtaFn& et) {
  const Value& v = prog.value(p);
  if (auto n = std::get_if<NumV>(&v)) return ONat{n->n};
  if (std::holds_alternative<ThunkV>(v)) return OLbl{et(p.child(0))};
  const BinderRef& b = prog.binder(p);
  if (auto l = std::get_if<LamBind>(&b)) return OLoc{l->at};
  if (auto s = std::get_if<SeqBind>(&b)) return OLoc{s->at};
  if (auto r = std::get_if<RecBind>(&b)) return OLbl{et(r->at.child(r->index))};
  return OVar{std::get<FreeVar>(b).name};
}

}  // namespace

Operand operand_of(const Program& prog, const Path& p) {
  return operand_with(prog, p, [&](const Path& q) { return eta(prog, q); });
}

PVal eval_operand(const PEnv& e, const Operand& o) {
  if (auto x = std::get_if<OVar>(&o)) return {SymVar{x->name}};
  if (auto n = std::get_if<ONat>(&o)) return {NumP{n->n}};
  if (auto l = std::get_if<OLbl>(&o)) return {PClosure{l->target, e}};
  const Path& q = std::get<OLoc>(o).at;
  if (auto v = e.find(q)) return *v;
  throw Error(ErrorKind::MissingBinding, "no value for location " + q.str());
}

Cfg compile(const Program& prog, Mutation m) {
  EtaFn et = [&](const Path& q) {
    return m == Mutation::EtaSkipsLetrec ? eta_no_letrec(prog, q) : eta(prog, q);
  };
  auto opnd = [&](const Path& q) { return operand_with(prog, q, et); };

  Cfg g;
  g.entry = et(Path{});
  for (const Path& p : prog.instruction_positions()) {
    const Term& t = prog.computation(p);
    auto a = aframes(prog, p);
    bool arg_head = !a.empty() && a.front().kind == AFrame::Kind::Arg;
    bool seq_head = !a.empty() && a.front().kind == AFrame::Kind::Seq;
    Block b{Halt{StuckReason::ApplyNonFunction}, {}};

    if (t.is<Force>()) {
      std::vector<Operand> args;
      std::optional<Path> bind;
      for (const AFrame& f : a) {
        if (f.kind == AFrame::Kind::Seq) {
          bind = f.at;
          break;
        }
        args.push_back(opnd(f.at.child(0)));
      }
      if (m == Mutation::ReverseArgOrder) std::reverse(args.begin(), args.end());
      if (bind) b = {Call{opnd(p.child(0)), std::move(args), *bind}, {et(bind->child(1))}};
      else b = {Tail{opnd(p.child(0)), std::move(args)}, {}};
    } else if (t.is<If0>()) {
      Path z = et(p.child(1)), nz = et(p.child(2));
      if (m == Mutation::SwapIf0Targets) std::swap(z, nz);
      b = {IfZero{opnd(p.child(0)), z, nz}, {z, nz}};
    } else if (t.is<Prd>()) {
      if (seq_head) b = {Mov{opnd(p.child(0)), a.front().at}, {et(a.front().at.child(1))}};
      else if (!arg_head) b = {Ret{opnd(p.child(0))}, {}};
    } else if (t.is<Lam>()) {
      if (arg_head) b = {Mov{opnd(a.front().at.child(0)), p}, {et(p.child(0))}};
      else if (!seq_head) b = {Pop{p}, {et(p.child(0))}};
      else b = {Halt{StuckReason::SequencedNonProducer}, {}};
    } else if (auto o = t.as<Op>()) {
      if (seq_head)
        b = {Arith{opnd(p.child(0)), o->op, opnd(p.child(1)), a.front().at},
             {et(a.front().at.child(1))}};
      else if (!arg_head) b = {ArithRet{opnd(p.child(0)), o->op, opnd(p.child(1))}, {}};
    }
    g.blocks.emplace(p, std::move(b));
  }
  return g;
}

namespace {

pek::Kont push_args(const PEnv& e, const std::vector<Operand>& args, pek::Kont k) {
  for (auto it = args.rbegin(); it != args.rend(); ++it) k = k.push({pek::KArg{eval_operand(e, *it)}});
  return k;
}

pek::StepResult deliver(const State& s, PVal v, TerminalKind kind) {
  if (s.kont.empty()) return Terminal<PVal>{kind, std::move(v)};
  if (auto r = std::get_if<pek::KRet>(&s.kont.top().f))
    return pek::Next{{r->resume, r->env.set(r->bind, std::move(v)), s.kont.pop()}};
  return Stuck{StuckReason::ApplyNonFunction};
}

std::optional<std::int64_t> num(const PVal& v) {
  if (auto n = std::get_if<NumP>(&v.v)) return n->n;
  return std::nullopt;
}

pek::StepResult exec(const Block& b, const State& s, Mutation m) {
  const PEnv& e = s.env;
  if (auto c = std::get_if<Call>(&b.ins)) {
    PVal f = eval_operand(e, c->fn);
    auto cl = std::get_if<PClosure>(&f.v);
    if (!cl) return Stuck{StuckReason::ForceNonThunk};
    PEnv saved = m == Mutation::CallSavesCalleeEnv ? cl->env : e;
    pek::Kont k = s.kont.push({pek::KRet{c->bind, b.succ.at(0), saved}});
    return pek::Next{{cl->entry, cl->env, push_args(e, c->args, k)}};
  }
  if (auto t = std::get_if<Tail>(&b.ins)) {
    PVal f = eval_operand(e, t->fn);
    auto cl = std::get_if<PClosure>(&f.v);
    if (!cl) return Stuck{StuckReason::ForceNonThunk};
    return pek::Next{{cl->entry, cl->env, push_args(e, t->args, s.kont)}};
  }
  if (auto mv = std::get_if<Mov>(&b.ins))
    return pek::Next{{b.succ.at(0), e.set(mv->dst, eval_operand(e, mv->src)), s.kont}};
  if (auto r = std::get_if<Ret>(&b.ins))
    return deliver(s, eval_operand(e, r->src), TerminalKind::ProducedValue);
  if (auto p = std::get_if<Pop>(&b.ins)) {
    if (s.kont.empty()) return Terminal<PVal>{TerminalKind::AwaitingArgument, std::nullopt};
    auto a = std::get_if<pek::KArg>(&s.kont.top().f);
    if (!a) return Stuck{StuckReason::SequencedNonProducer};
    return pek::Next{{b.succ.at(0), e.set(p->dst, a->v), s.kont.pop()}};
  }
  if (auto i = std::get_if<IfZero>(&b.ins)) {
    auto n = num(eval_operand(e, i->guard));
    if (!n) return Stuck{StuckReason::GuardNotNumeral};
    return pek::Next{{*n == 0 ? i->zero : i->nonzero, e, s.kont}};
  }
  if (auto o = std::get_if<Arith>(&b.ins)) {
    auto x = num(eval_operand(e, o->lhs)), y = num(eval_operand(e, o->rhs));
    if (!x || !y) return Stuck{StuckReason::ArithNonNumeral};
    return pek::Next{{b.succ.at(0), e.set(o->dst, {NumP{apply_arith(o->op, *x, *y)}}), s.kont}};
  }
  if (auto o = std::get_if<ArithRet>(&b.ins)) {
    auto x = num(eval_operand(e, o->lhs)), y = num(eval_operand(e, o->rhs));
    if (!x || !y) return Stuck{StuckReason::ArithNonNumeral};
    return deliver(s, {NumP{apply_arith(o->op, *x, *y)}}, TerminalKind::BareArith);
  }
  return Stuck{std::get<Halt>(b.ins).reason};
}

}  // namespace

pek::StepResult step(const Cfg& g, const State& s, Mutation m) {
  auto it = g.blocks.find(s.pc);
  if (it == g.blocks.end()) throw Error(ErrorKind::UnknownPc, "no instruction at " + s.pc.str());
  try {
    return exec(it->second, s, m);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::MissingBinding) return Stuck{StuckReason::UnboundPath};
    throw;
  }
}

std::pair<Cfg, State> load(const Program& prog) { return {compile(prog), pek::load(prog)}; }

TermPtr unload(const Program& prog, const State& s) {
  return cek::unload(peak::unload(prog, pek::unload(prog, s)));
}

const char* mnemonic(const Instruction& ins) {
  static const char* names[] = {"CALL", "TAIL", "MOV", "RET", "POP", "IF0", "OP", "OPRET", "STUCK"};
  return names[ins.index()];
}

// -------------------------------------------------------------- printing

namespace {

const std::string& binder_name(const Program& prog, const Path& q) {
  const Term& t = prog.computation(q);
  if (auto l = t.as<Lam>()) return l->binder;
  if (auto s = t.as<Seq>()) return s->binder;
  throw Error(ErrorKind::IllFormedState, "location " + q.str() + " is not a binder");
}

class Namer {
 public:
  Namer(const Program& prog, const Cfg& g) : prog_(prog) {
    std::map<std::string, std::set<Path>> by_name;
    for (const Path& q : locations(g)) by_name[binder_name(prog, q)].insert(q);
    for (auto& [name, ps] : by_name)
      if (ps.size() > 1) clashing_.insert(name);
    std::size_t i = 0;
    for (auto& [p, _] : g.blocks) labels_[p] = i++;
  }

  std::string loc(const Path& q) const {
    const std::string& n = binder_name(prog_, q);
    return clashing_.count(n) ? n + "#" + q.str() : n;
  }

  std::string label(const Path& p) const {
    auto it = labels_.find(p);
    return it == labels_.end() ? "?" + p.str() : std::to_string(it->second);
  }

  std::string operand(const Operand& o) const {
    if (auto x = std::get_if<OVar>(&o)) return x->name;
    if (auto n = std::get_if<ONat>(&o)) return std::to_string(n->n);
    if (auto l = std::get_if<OLoc>(&o)) return loc(l->at);
    return "@" + label(std::get<OLbl>(o).target);
  }

  static std::set<Path> locations(const Cfg& g) {
    std::set<Path> out;
    auto op = [&](const Operand& o) {
      if (auto l = std::get_if<OLoc>(&o)) out.insert(l->at);
    };
    for (auto& [_, b] : g.blocks) {
      std::visit(
          [&](const auto& i) {
            using T = std::decay_t<decltype(i)>;
            if constexpr (std::is_same_v<T, Call>) {
              op(i.fn);
              for (auto& a : i.args) op(a);
              out.insert(i.bind);
            } else if constexpr (std::is_same_v<T, Tail>) {
              op(i.fn);
              for (auto& a : i.args) op(a);
            } else if constexpr (std::is_same_v<T, Mov>) {
              op(i.src);
              out.insert(i.dst);
            } else if constexpr (std::is_same_v<T, Ret>) {
              op(i.src);
            } else if constexpr (std::is_same_v<T, Pop>) {
              out.insert(i.dst);
            } else if constexpr (std::is_same_v<T, IfZero>) {
              op(i.guard);
            } else if constexpr (std::is_same_v<T, Arith>) {
              op(i.lhs);
              op(i.rhs);
              out.insert(i.dst);
            } else if constexpr (std::is_same_v<T, ArithRet>) {
              op(i.lhs);
              op(i.rhs);
            }
          },
          b.ins);
    }
    return out;
  }

 private:
  const Program& prog_;
  std::set<std::string> clashing_;
  std::map<Path, std::size_t> labels_;
};

std::string record_operand(const Operand& o) {
  if (auto x = std::get_if<OVar>(&o)) return "VAR:" + x->name;
  if (auto n = std::get_if<ONat>(&o)) return "NAT:" + std::to_string(n->n);
  if (auto l = std::get_if<OLoc>(&o)) return "LOC:" + l->at.str();
  return "LBL:" + std::get<OLbl>(o).target.str();
}

// Operand words of an instruction; dst(p) renders a destination.
template <class Op, class Dst>
std::vector<std::string> words(const Instruction& ins, Op op, Dst dst) {
  std::vector<std::string> w;
  std::visit(
      [&](const auto& i) {
        using T = std::decay_t<decltype(i)>;
        if constexpr (std::is_same_v<T, Call>) {
          w.push_back(op(i.fn));
          for (auto& a : i.args) w.push_back(op(a));
          w.push_back(dst(i.bind));
        } else if constexpr (std::is_same_v<T, Tail>) {
          w.push_back(op(i.fn));
          for (auto& a : i.args) w.push_back(op(a));
        } else if constexpr (std::is_same_v<T, Mov>) {
          w.push_back(op(i.src));
          w.push_back(dst(i.dst));
        } else if constexpr (std::is_same_v<T, Ret>) {
          w.push_back(op(i.src));
        } else if constexpr (std::is_same_v<T, Pop>) {
          w.push_back(dst(i.dst));
        } else if constexpr (std::is_same_v<T, IfZero>) {
          w.push_back(op(i.guard));
        } else if constexpr (std::is_same_v<T, Arith>) {
          w.push_back(cbpv::mnemonic(i.op));
          w.push_back(op(i.lhs));
          w.push_back(op(i.rhs));
          w.push_back(dst(i.dst));
        } else if constexpr (std::is_same_v<T, ArithRet>) {
          w.push_back(cbpv::mnemonic(i.op));
          w.push_back(op(i.lhs));
          w.push_back(op(i.rhs));
        } else {
          w.push_back(cbpv::to_string(i.reason));
        }
      },
      ins);
  return w;
}

}  // namespace

std::string print_cfg(const Program& prog, const Cfg& g) {
  Namer nm(prog, g);
  std::string out;
  for (auto& [p, b] : g.blocks) {
    out += nm.label(p) + ": " + mnemonic(b.ins);
    auto w = words(
        b.ins, [&](const Operand& o) { return nm.operand(o); },
        [&](const Path& q) { return "-> " + nm.loc(q); });
    for (auto& x : w) out += " " + x;
    out += " [";
    for (std::size_t i = 0; i < b.succ.size(); ++i) {
      if (i) out += ",";
      out += nm.label(b.succ[i]);
    }
    out += "]\n";
  }
  return out;
}

std::string print_records(const Program& prog, const Cfg& g) {
  Namer nm(prog, g);
  std::string out;
  for (auto& [p, b] : g.blocks) {
    out += nm.label(p) + "\t" + p.str() + "\t" + mnemonic(b.ins) + "\t";
    auto w = words(b.ins, record_operand, [](const Path& q) { return "DST:" + q.str(); });
    for (std::size_t i = 0; i < w.size(); ++i) out += (i ? "," : "") + w[i];
    out += "\t";
    for (std::size_t i = 0; i < b.succ.size(); ++i) out += (i ? "," : "") + nm.label(b.succ[i]);
    out += "\n";
  }
  return out;
}

std::string normalize_listing(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    for (auto [from, to] : {std::pair{": ORET ", ": OPRET "}, std::pair{": CBR ", ": IF0 "}}) {
      if (auto at = line.find(from); at != std::string::npos) line.replace(at, std::string(from).size(), to);
    }
    out += line + "\n";
  }
  return out;
}

std::set<Path> paths_mentioned(const Cfg& g) {
  std::set<Path> out = Namer::locations(g);
  out.insert(g.entry);
  for (auto& [p, b] : g.blocks) {
    out.insert(p);
    out.insert(b.succ.begin(), b.succ.end());
    auto lbl = [&](const Operand& o) {
      if (auto l = std::get_if<OLbl>(&o)) out.insert(l->target);
      return std::string();
    };
    words(b.ins, lbl, [](const Path&) { return std::string(); });
    if (auto i = std::get_if<IfZero>(&b.ins)) {
      out.insert(i->zero);
      out.insert(i->nonzero);
    }
  }
  return out;
}

std::string trace_line(std::size_t i, const Cfg& g, const State& s) {
  auto it = g.blocks.find(s.pc);
  return "cfg " + std::to_string(i) + ": pc=" + s.pc.str() + " " +
         (it == g.blocks.end() ? "?" : mnemonic(it->second.ins)) +
         " env=" + std::to_string(s.env.size()) + " kont=" + std::to_string(s.kont.size());
}

}  // namespace cbpv::cfg
