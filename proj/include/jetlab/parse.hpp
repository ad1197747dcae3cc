#pragma once

#include <string>

#include "jetlab/diffpoly.hpp"

namespace jetlab {

/* Grammar (no implicit multiplication):
     expr    := ['-'] term (('+'|'-') term)*
     term    := factor (('*'|'/') factor)*
     factor  := primary ['^' integer]
     primary := integer | identifier | '(' expr ')'
   '/' requires a nonzero constant right operand, which also covers
   rational literals a/b. Identifiers are declared independents, declared
   dependents, or dependent_suffix derivatives like u_xxt; the suffix is
   order-insensitive. */
DiffPoly parse_expr(const std::string& text, const Context& ctx);

// Resolve a bare identifier such as "u_xt" to a jet variable.
JetVar parse_jetvar(const std::string& ident, const Context& ctx);

// Validate a variable name for context declarations.
void check_name(const std::string& name);

} // namespace jetlab
