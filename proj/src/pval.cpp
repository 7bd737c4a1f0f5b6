#include "cbpv/pval.hpp"

#include <set>
#include <utility>

namespace cbpv {

namespace {
const std::shared_ptr<const PEnv::Map>& empty_map() {
  static const auto m = std::make_shared<const PEnv::Map>();
  return m;
}
}  // namespace

PEnv::PEnv() : m_(empty_map()) {}

const PVal* PEnv::find(const Path& q) const {
  auto it = m_->find(q);
  return it == m_->end() ? nullptr : &it->second;
}

PEnv PEnv::set(const Path& q, PVal v) const {
  auto m = std::make_shared<Map>(*m_);
  m->insert_or_assign(q, std::move(v));
  PEnv r;
  r.m_ = std::move(m);
  return r;
}

std::size_t PEnv::size() const { return m_->size(); }
const PEnv::Map& PEnv::entries() const { return *m_; }

namespace {

// Environments form a DAG through closures; remember pairs already shown
// equal so shared structure is compared once.
struct EqMemo {
  std::set<std::pair<const void*, const void*>> done;

  bool env(const PEnv& a, const PEnv& b) {
    if (a.id() == b.id()) return true;
    if (a.size() != b.size()) return false;
    if (!done.insert({a.id(), b.id()}).second) return true;
    auto i = a.entries().begin();
    auto j = b.entries().begin();
    for (; i != a.entries().end(); ++i, ++j)
      if (i->first != j->first || !val(i->second, j->second)) return false;
    return true;
  }

  bool val(const PVal& a, const PVal& b) {
    if (a.v.index() != b.v.index()) return false;
    if (auto x = std::get_if<SymVar>(&a.v)) return x->name == std::get<SymVar>(b.v).name;
    if (auto n = std::get_if<NumP>(&a.v)) return n->n == std::get<NumP>(b.v).n;
    const auto& c = std::get<PClosure>(a.v);
    const auto& d = std::get<PClosure>(b.v);
    return c.entry == d.entry && env(c.env, d.env);
  }
};

}  // namespace

bool same(const PVal& a, const PVal& b) {
  EqMemo m;
  return m.val(a, b);
}

bool same(const PEnv& a, const PEnv& b) {
  EqMemo m;
  return m.env(a, b);
}

std::string print(const PVal& v) {
  if (auto x = std::get_if<SymVar>(&v.v)) return "sym " + x->name;
  if (auto n = std::get_if<NumP>(&v.v)) return std::to_string(n->n);
  const auto& c = std::get<PClosure>(v.v);
  return "[" + c.entry.str() + ", #" + std::to_string(c.env.size()) + "]";
}

std::string print(const PEnv& e) {
  std::string out = "{";
  bool first = true;
  for (auto& [k, v] : e.entries()) {
    if (!first) out += ", ";
    first = false;
    out += k.str() + "->" + print(v);
  }
  return out + "}";
}

}  // namespace cbpv
