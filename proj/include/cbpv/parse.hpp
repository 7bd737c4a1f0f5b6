#pragma once

#include <string_view>

#include "cbpv/term.hpp"

namespace cbpv {

// Concrete syntax, one term per source. '#' starts a line comment.
//
//   term     := "\" x "." term | "letrec" x "=" term ("and" x "=" term)* "in" term
//             | app ["to" x "in" term]
//   app      := value "." (app | lambda | letrec) | atom
//   atom     := "force" value | "prd" value | value op value
//             | "if0" value "{" term "}" "{" term "}" | "(" term ")"
//   value    := x | integer | "thunk" "{" term "}"
//
// Throws SyntaxError with a 1-based line and column.
TermPtr parse_source(std::string_view text);

}  // namespace cbpv
