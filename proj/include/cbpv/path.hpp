#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cbpv {

// Position of a node inside a program, stored root-first. The formal
// notation writes paths innermost-first (n::p), so child(n) appends.
class Path {
 public:
  Path() = default;
  explicit Path(std::vector<std::uint32_t> root_first) : idx_(std::move(root_first)) {}

  static Path parse(std::string_view text);  // "ε", "" or "1.0.2"

  Path child(std::uint32_t n) const;
  Path parent() const;
  std::uint32_t last() const { return idx_.back(); }
  bool empty() const { return idx_.empty(); }
  std::size_t depth() const { return idx_.size(); }
  std::span<const std::uint32_t> indices() const { return idx_; }

  // True when *this is p or an ancestor of p (a suffix of p in the
  // innermost-first reading).
  bool encloses(const Path& p) const;

  std::string str() const;

  friend auto operator<=>(const Path&, const Path&) = default;
  friend bool operator==(const Path&, const Path&) = default;

 private:
  std::vector<std::uint32_t> idx_;
};

struct PathHash {
  std::size_t operator()(const Path& p) const noexcept;
};

}  // namespace cbpv
