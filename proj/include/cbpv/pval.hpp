#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>

#include "cbpv/path.hpp"

namespace cbpv {

struct PVal;

// Path-indexed environment. set() copies; captured snapshots never change.
class PEnv {
 public:
  using Map = std::map<Path, PVal>;

  PEnv();
  const PVal* find(const Path& q) const;
  PEnv set(const Path& q, PVal v) const;
  std::size_t size() const;
  const Map& entries() const;
  const void* id() const { return m_.get(); }

 private:
  std::shared_ptr<const Map> m_;
};

struct SymVar {
  std::string name;
};
struct NumP {
  std::int64_t n;
};
struct PClosure {
  Path entry;
  PEnv env;
};
struct PVal {
  std::variant<SymVar, NumP, PClosure> v;
};

bool same(const PVal& a, const PVal& b);
bool same(const PEnv& a, const PEnv& b);
std::string print(const PVal& v);
std::string print(const PEnv& e);

}  // namespace cbpv
