#pragma once

#include <string>

#include "swsym/expr.hpp"

namespace swsym {

// Parses the plain-text expression form documented in
// docs/expression-grammar.md (the same form Expr::str() emits), so that
// parse_expr(e.str()) == e for every expression.
//
// Name resolution: t, x, y, w are coordinates; u, v, h, H, U, V are
// dependents; d_s with d a dependent letter and s a string of coordinate
// letters is a jet variable; H0, U0, V0 are integration constants;
// sin, cos, sinh, cosh, exp (followed by "(") are function applications;
// every other identifier is a parameter.
//
// Errors: malformed input raises ParseError; a "^" exponent that is not an
// optionally signed integer raises UnsupportedFormError.
Expr parse_expr(const std::string& text);

}  // namespace swsym
