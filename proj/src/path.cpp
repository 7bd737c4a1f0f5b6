#include "cbpv/path.hpp"

#include <charconv>

#include "cbpv/error.hpp"

namespace cbpv {

Path Path::parse(std::string_view text) {
  std::vector<std::uint32_t> idx;
  if (text.empty() || text == "ε" || text == "e") return Path{};
  std::size_t i = 0;
  while (i <= text.size()) {
    std::size_t j = text.find('.', i);
    if (j == std::string_view::npos) j = text.size();
    std::uint32_t n = 0;
    auto piece = text.substr(i, j - i);
    auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), n);
    if (ec != std::errc{} || ptr != piece.data() + piece.size() || piece.empty())
      throw Error(ErrorKind::InvalidPath, "bad path: " + std::string(text));
    idx.push_back(n);
    i = j + 1;
  }
  return Path{std::move(idx)};
}

Path Path::child(std::uint32_t n) const {
  Path p;
  p.idx_.reserve(idx_.size() + 1);
  p.idx_ = idx_;
  p.idx_.push_back(n);
  return p;
}

Path Path::parent() const {
  if (idx_.empty()) throw Error(ErrorKind::InvalidPath, "root has no parent");
  return Path{std::vector<std::uint32_t>(idx_.begin(), idx_.end() - 1)};
}

bool Path::encloses(const Path& p) const {
  if (idx_.size() > p.idx_.size()) return false;
  for (std::size_t i = 0; i < idx_.size(); ++i)
    if (idx_[i] != p.idx_[i]) return false;
  return true;
}

std::string Path::str() const {
  if (idx_.empty()) return "ε";
  std::string s;
  for (std::size_t i = 0; i < idx_.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(idx_[i]);
  }
  return s;
}

std::size_t PathHash::operator()(const Path& p) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (auto n : p.indices()) h = (h ^ n) * 1099511628211ull;
  return h;
}

const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidPath: return "InvalidPath";
    case ErrorKind::NotAVariable: return "NotAVariable";
    case ErrorKind::NotAValue: return "NotAValue";
    case ErrorKind::NotAComputation: return "NotAComputation";
    case ErrorKind::MissingBinding: return "MissingBinding";
    case ErrorKind::IllFormedState: return "IllFormedState";
    case ErrorKind::UnknownPc: return "UnknownPc";
    case ErrorKind::NoMatch: return "NoMatch";
    case ErrorKind::Syntax: return "SyntaxError";
  }
  return "?";
}

SyntaxError::SyntaxError(int line, int column, const std::string& msg)
    : Error(ErrorKind::Syntax,
            std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
      line_(line),
      column_(column) {}

}  // namespace cbpv
