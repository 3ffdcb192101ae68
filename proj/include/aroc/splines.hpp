#pragma once

// B-spline basis expansions and regression design rows. The basis is the
// clamped partition-of-unity B-spline family on K interior knots placed at
// evenly spaced empirical quantiles of the reference (nondiseased) covariate
// sample: K+3 nonnegative local functions summing to one, equal to
// (1,0,...,0) at the left boundary and (0,...,0,1) at the right. Inputs
// outside the boundary knots are clamped, so design rows extend to covariate
// values (e.g. from the diseased sample) beyond the reference range.

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace aroc::splines {

// Spline order (degree + 1). The clamped basis has K + kOrder functions per
// term; kOrder = 3 realizes the K+3-dimensional contract.
inline constexpr int kOrder = 3;

struct KnotSet {
  std::vector<double> interior;  // strictly increasing, strictly inside (low, high)
  double low = 0.0;              // boundary knots = sample min / max
  double high = 1.0;
  int dim() const { return static_cast<int>(interior.size()) + kOrder; }
};

// Interior knot k sits at the k/(K+1) empirical quantile (linear interpolation
// between order statistics); boundaries at the sample extremes. Throws
// DataError when the sample is degenerate or ties collapse adjacent knots.
KnotSet knot_sequence(const std::vector<double>& values, int n_interior);

// Basis vector at x (clamped into [low, high]); length dim(), entries >= 0,
// sums to one; at most kOrder consecutive entries are nonzero.
Eigen::VectorXd bspline_basis(const KnotSet& knots, double x);

// ===== model terms =====

struct LinearTerm { std::string name; };
struct FactorTerm { std::string name; };                             // binary 0/1 column
struct SmoothTerm { std::string name; int n_interior = 0; };         // B-spline expansion
struct FactorSmoothTerm {                                            // one curve per factor level
  std::string name;                                                  // continuous covariate
  std::string by;                                                    // binary factor
  int n_interior = 0;
};
using Term = std::variant<LinearTerm, FactorTerm, SmoothTerm, FactorSmoothTerm>;

// Columns contributed by a term. FactorSmooth emits a basis block per level
// plus the factor main-effect column, so the factor's level shift is always
// adjusted for alongside the per-level curves.
int term_dimension(const Term& term);

// Human-readable term label for metadata / config echo.
std::string term_label(const Term& term);

struct ModelSpec {
  bool intercept = true;
  std::vector<Term> terms;
};

// Covariate value lookup used to evaluate a design row for one record.
using ValueLookup = std::function<double(const std::string&)>;

struct BuiltTerm {
  Term term;
  std::optional<KnotSet> knots;  // present for Smooth / FactorSmooth
  int offset = 0;                // first design column of this term's block
  int dim = 0;
};

struct ModelDesign {
  bool intercept = true;
  std::vector<BuiltTerm> terms;
  int q = 0;  // total design dimension

  Eigen::VectorXd row(const ValueLookup& value) const;
};

// Resolve a model spec against covariate columns (the nondiseased sample):
// computes knot sets for smooth terms and validates factor columns are 0/1.
ModelDesign build_design(const ModelSpec& spec,
                         const std::function<const std::vector<double>&(const std::string&)>& column);

}  // namespace aroc::splines
