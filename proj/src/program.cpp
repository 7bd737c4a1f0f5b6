#include "cbpv/program.hpp"

namespace cbpv {

std::string AFrame::str() const {
  return (kind == Kind::Arg ? "ARG " : "SEQ ") + at.str();
}

namespace {

void index_value(const Term& root, const Value& v, const Path& p,
                 std::unordered_map<Path, BinderRef, PathHash>& binders,
                 std::vector<Path>& instrs);

void index_term(const Term& root, const Term& t, const Path& p,
                std::unordered_map<Path, BinderRef, PathHash>& binders,
                std::vector<Path>& instrs) {
  if (is_instruction(t)) instrs.push_back(p);
  auto val = [&](const Value& v, std::uint32_t n) {
    index_value(root, v, p.child(n), binders, instrs);
  };
  auto sub = [&](const TermPtr& m, std::uint32_t n) {
    index_term(root, *m, p.child(n), binders, instrs);
  };
  if (auto f = t.as<Force>()) val(f->v, 0);
  else if (auto r = t.as<Prd>()) val(r->v, 0);
  else if (auto a = t.as<App>()) {
    val(a->arg, 0);
    sub(a->body, 1);
  } else if (auto l = t.as<Lam>()) {
    sub(l->body, 0);
  } else if (auto s = t.as<Seq>()) {
    sub(s->left, 0);
    sub(s->right, 1);
  } else if (auto lr = t.as<LetRec>()) {
    sub(lr->body, 0);
    for (std::size_t j = 0; j < lr->defs.size(); ++j)
      sub(lr->defs[j].body, static_cast<std::uint32_t>(j + 1));
  } else if (auto i = t.as<If0>()) {
    val(i->guard, 0);
    sub(i->then_branch, 1);
    sub(i->else_branch, 2);
  } else if (auto o = t.as<Op>()) {
    val(o->lhs, 0);
    val(o->rhs, 1);
  }
}

void index_value(const Term& root, const Value& v, const Path& p,
                 std::unordered_map<Path, BinderRef, PathHash>& binders,
                 std::vector<Path>& instrs) {
  if (std::holds_alternative<VarV>(v)) binders.emplace(p, resolve_binder(root, p));
  else if (auto t = std::get_if<ThunkV>(&v)) index_term(root, *t->body, p.child(0), binders, instrs);
}

}  // namespace

Program::Program(TermPtr root) : root_(std::move(root)) {
  index_term(*root_, *root_, Path{}, binders_, instrs_);
}

const BinderRef& Program::binder(const Path& occ) const {
  auto it = binders_.find(occ);
  if (it == binders_.end()) throw Error(ErrorKind::NotAVariable, "not a variable at " + occ.str());
  return it->second;
}

bool is_instruction(const Term& t) {
  return t.is<Force>() || t.is<Prd>() || t.is<Lam>() || t.is<If0>() || t.is<Op>();
}

bool is_search(const Term& t) { return t.is<App>() || t.is<Seq>() || t.is<LetRec>(); }

Path eta(const Program& prog, const Path& start) {
  Path p = start;
  for (;;) {
    const Term& t = prog.computation(p);
    if (t.is<Seq>() || t.is<LetRec>()) p = p.child(0);
    else if (t.is<App>()) p = p.child(1);
    else return p;
  }
}

std::vector<AFrame> aframes(const Program& prog, const Path& p) {
  // Walk root to p, keeping the stack top-first at the back.
  std::vector<AFrame> stack;
  NodeRef cur = &*prog.root();
  Path here;
  for (auto n : p.indices()) {
    auto t = std::get_if<const Term*>(&cur);
    if (!t) {
      stack.clear();  // thunk body
    } else if ((*t)->is<App>() && n == 1) {
      stack.push_back({AFrame::Kind::Arg, here});
    } else if ((*t)->is<Lam>() && n == 0) {
      if (!stack.empty() && stack.back().kind == AFrame::Kind::Arg) stack.pop_back();
    } else if ((*t)->is<Seq>() && n == 0) {
      stack.push_back({AFrame::Kind::Seq, here});
    } else if (((*t)->is<LetRec>() && n == 0) || ((*t)->is<Seq>() && n == 1) ||
               ((*t)->is<If0>() && (n == 1 || n == 2))) {
      // passes through
    } else {
      stack.clear();
    }
    here = here.child(n);
    cur = child_node(cur, n);
  }
  return {stack.rbegin(), stack.rend()};
}

Path spine_root(const Program& prog, const Path& start) {
  Path p = start;
  while (!p.empty()) {
    Path q = p.parent();
    auto r = prog.at(q);
    auto tp = std::get_if<const Term*>(&r);
    if (!tp) break;  // thunk body
    const Term& t = **tp;
    std::uint32_t n = p.last();
    bool search = (t.is<Seq>() && n == 0) || (t.is<App>() && n == 1) || (t.is<LetRec>() && n == 0);
    if (!search) break;
    p = std::move(q);
  }
  return p;
}

std::vector<Path> scope_binders(const Program& prog, const Path& p) {
  std::vector<Path> out;
  NodeRef cur = &*prog.root();
  Path here;
  for (auto n : p.indices()) {
    if (auto t = std::get_if<const Term*>(&cur)) {
      if (((*t)->is<Lam>() && n == 0) || ((*t)->is<Seq>() && n == 1)) out.push_back(here);
    }
    here = here.child(n);
    cur = child_node(cur, n);
  }
  return out;
}

std::optional<Path> letrec_def_parent(const Program& prog, const Path& p) {
  if (p.empty() || p.last() == 0) return std::nullopt;
  Path q = p.parent();
  auto r = prog.at(q);
  auto t = std::get_if<const Term*>(&r);
  if (t && (*t)->is<LetRec>()) return q;
  return std::nullopt;
}

}  // namespace cbpv
