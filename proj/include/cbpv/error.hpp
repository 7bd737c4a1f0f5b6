#pragma once

#include <stdexcept>
#include <string>

namespace cbpv {

enum class ErrorKind {
  InvalidPath,
  NotAVariable,
  NotAValue,
  NotAComputation,
  MissingBinding,
  IllFormedState,
  UnknownPc,
  NoMatch,
  Syntax,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(int line, int column, const std::string& msg);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace cbpv
