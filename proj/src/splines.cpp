#include "aroc/splines.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "aroc/common.hpp"
#include "aroc/stats.hpp"

namespace aroc::splines {

namespace {

// Full knot vector with boundary knots repeated to multiplicity kOrder.
std::vector<double> extended_knots(const KnotSet& ks) {
  std::vector<double> t;
  t.reserve(ks.interior.size() + 2 * kOrder);
  for (int i = 0; i < kOrder; ++i) t.push_back(ks.low);
  t.insert(t.end(), ks.interior.begin(), ks.interior.end());
  for (int i = 0; i < kOrder; ++i) t.push_back(ks.high);
  return t;
}

void validate_knots(const KnotSet& ks) {
  if (!(ks.low < ks.high)) throw DataError("bspline_basis: degenerate boundary knots");
  double prev = ks.low;
  for (double k : ks.interior) {
    if (!(prev < k)) throw DataError("bspline_basis: knots not strictly increasing");
    prev = k;
  }
  if (!(prev < ks.high)) throw DataError("bspline_basis: knots not strictly increasing");
}

double binary_level(const std::string& name, double v) {
  if (v == 0.0 || v == 1.0) return v;
  std::ostringstream os;
  os << "factor covariate '" << name << "' must be 0 or 1, got " << v;
  throw DataError(os.str());
}

double finite_value(const ValueLookup& value, const std::string& name) {
  const double v = value(name);
  if (!std::isfinite(v)) throw DataError("non-finite value for covariate '" + name + "'");
  return v;
}

}  // namespace

KnotSet knot_sequence(const std::vector<double>& values, int n_interior) {
  if (n_interior < 0) throw std::invalid_argument("knot_sequence: negative knot count");
  if (values.size() < 2) throw DataError("knot_sequence: need at least two covariate values");
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  if (!std::isfinite(sorted.front()) || !std::isfinite(sorted.back()))
    throw DataError("knot_sequence: non-finite covariate values");

  KnotSet ks;
  ks.low = sorted.front();
  ks.high = sorted.back();
  if (!(ks.low < ks.high)) throw DataError("knot_sequence: all covariate values identical");
  ks.interior.reserve(n_interior);
  for (int k = 1; k <= n_interior; ++k) {
    const double p = static_cast<double>(k) / static_cast<double>(n_interior + 1);
    ks.interior.push_back(stats::quantile_sorted(sorted, p));
  }
  validate_knots(ks);  // ties in the sample can collapse adjacent quantiles
  return ks;
}

Eigen::VectorXd bspline_basis(const KnotSet& ks, double x) {
  validate_knots(ks);
  if (std::isnan(x)) throw DataError("bspline_basis: NaN input");
  x = std::clamp(x, ks.low, ks.high);

  const int nbasis = ks.dim();

  // at a clamped boundary the basis is exactly a unit vector
  if (x == ks.low || x == ks.high) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(nbasis);
    out[x == ks.low ? 0 : nbasis - 1] = 1.0;
    return out;
  }

  const std::vector<double> t = extended_knots(ks);

  // span j: t[j] <= x < t[j+1], with x == high assigned to the last interval
  int j = kOrder - 1;
  const int jmax = nbasis - 1;
  while (j < jmax && x >= t[j + 1]) ++j;

  // de Boor triangular scheme: the kOrder basis values active on span j
  double n[kOrder], left[kOrder], right[kOrder];
  n[0] = 1.0;
  for (int r = 1; r < kOrder; ++r) {
    left[r] = x - t[j + 1 - r];
    right[r] = t[j + r] - x;
    double saved = 0.0;
    for (int k = 0; k < r; ++k) {
      const double temp = n[k] / (right[k + 1] + left[r - k]);
      n[k] = saved + right[k + 1] * temp;
      saved = left[r - k] * temp;
    }
    n[r] = saved;
  }

  Eigen::VectorXd out = Eigen::VectorXd::Zero(nbasis);
  for (int k = 0; k < kOrder; ++k) out[j - kOrder + 1 + k] = n[k];
  return out;
}

int term_dimension(const Term& term) {
  return std::visit(
      [](const auto& t) -> int {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, LinearTerm> || std::is_same_v<T, FactorTerm>)
          return 1;
        else if constexpr (std::is_same_v<T, SmoothTerm>)
          return t.n_interior + kOrder;
        else
          return 2 * (t.n_interior + kOrder) + 1;
      },
      term);
}

std::string term_label(const Term& term) {
  return std::visit(
      [](const auto& t) -> std::string {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, LinearTerm>)
          return t.name;
        else if constexpr (std::is_same_v<T, FactorTerm>)
          return "factor(" + t.name + ")";
        else if constexpr (std::is_same_v<T, SmoothTerm>)
          return "s(" + t.name + ", K=" + std::to_string(t.n_interior) + ")";
        else
          return "s(" + t.name + ", K=" + std::to_string(t.n_interior) + ", by=" + t.by + ")";
      },
      term);
}

Eigen::VectorXd ModelDesign::row(const ValueLookup& value) const {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(q);
  if (intercept) z[0] = 1.0;
  for (const auto& bt : terms) {
    std::visit(
        [&](const auto& t) {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, LinearTerm>) {
            z[bt.offset] = finite_value(value, t.name);
          } else if constexpr (std::is_same_v<T, FactorTerm>) {
            z[bt.offset] = binary_level(t.name, finite_value(value, t.name));
          } else if constexpr (std::is_same_v<T, SmoothTerm>) {
            z.segment(bt.offset, bt.knots->dim()) =
                bspline_basis(*bt.knots, finite_value(value, t.name));
          } else {
            const int block = bt.knots->dim();
            const double g = binary_level(t.by, finite_value(value, t.by));
            const int level_offset = bt.offset + (g == 1.0 ? block : 0);
            z.segment(level_offset, block) =
                bspline_basis(*bt.knots, finite_value(value, t.name));
            z[bt.offset + 2 * block] = g;  // factor main effect
          }
        },
        bt.term);
  }
  return z;
}

ModelDesign build_design(
    const ModelSpec& spec,
    const std::function<const std::vector<double>&(const std::string&)>& column) {
  ModelDesign d;
  d.intercept = spec.intercept;
  d.q = spec.intercept ? 1 : 0;
  for (const auto& term : spec.terms) {
    BuiltTerm bt;
    bt.term = term;
    bt.offset = d.q;
    bt.dim = term_dimension(term);
    std::visit(
        [&](const auto& t) {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, FactorTerm>) {
            for (double v : column(t.name)) binary_level(t.name, v);
          } else if constexpr (std::is_same_v<T, SmoothTerm>) {
            bt.knots = knot_sequence(column(t.name), t.n_interior);
          } else if constexpr (std::is_same_v<T, FactorSmoothTerm>) {
            bt.knots = knot_sequence(column(t.name), t.n_interior);
            for (double v : column(t.by)) binary_level(t.by, v);
          }
        },
        term);
    d.q += bt.dim;
    d.terms.push_back(std::move(bt));
  }
  if (d.q == 0) throw DataError("build_design: empty model (no intercept, no terms)");
  return d;
}

}  // namespace aroc::splines
