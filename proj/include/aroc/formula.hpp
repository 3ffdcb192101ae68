#pragma once

#include <string>

#include "aroc/splines.hpp"

namespace aroc::formula {

struct ParsedFormula {
  std::string response;
  splines::ModelSpec spec;
};

// Parse a model formula of the form
//
//   y ~ x1 + factor(g) + s(x2, K=3) + s(x3, K=0, by=g)
//
// Terms:
//   name               -> linear term
//   factor(name)       -> binary (0/1) factor term
//   s(name)            -> smooth term, default K
//   s(name, K=k)       -> smooth term with k interior knots
//   s(name, K=k, by=g) -> factor-by-curve interaction: one curve per level
//                         of g plus a main effect column for g
//
// A bare term naming the same variable as some `by=` factor is absorbed
// into the interaction (which already carries the main effect), so
// `y ~ g + s(x, K=0, by=g)` and `y ~ s(x, K=0, by=g)` build identical
// designs. Duplicate terms are an error.
ParsedFormula parse_formula(const std::string& text, int default_knots = 0);

}  // namespace aroc::formula
