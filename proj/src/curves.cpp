#include "aroc/curves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "aroc/common.hpp"
#include "aroc/stats.hpp"

namespace aroc::curves {

namespace {

void validate_grid(const Eigen::VectorXd& grid) {
  if (grid.size() == 0) throw DataError("curve grid is empty");
  for (Eigen::Index g = 0; g < grid.size(); ++g) {
    if (!(grid[g] >= 0.0 && grid[g] <= 1.0)) throw DataError("curve grid must lie in [0, 1]");
    if (g > 0 && grid[g] < grid[g - 1]) throw DataError("curve grid must be nondecreasing");
  }
}

void validate_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw DataError("credible level must lie in (0, 1)");
}

// indices of v in ascending order of value
std::vector<int> sort_order(const Eigen::VectorXd& v) {
  std::vector<int> ord(static_cast<std::size_t>(v.size()));
  std::iota(ord.begin(), ord.end(), 0);
  std::sort(ord.begin(), ord.end(), [&v](int a, int b) { return v[a] < v[b]; });
  return ord;
}

}  // namespace

ScalarEstimate summarize(std::vector<double> draws, double level) {
  validate_level(level);
  if (draws.empty()) throw DataError("summarize: no draws");
  ScalarEstimate out;
  out.mean = stats::mean(draws);
  std::sort(draws.begin(), draws.end());
  const double tail = 0.5 * (1.0 - level);
  out.lower = stats::quantile_sorted(draws, tail);
  out.upper = stats::quantile_sorted(draws, 1.0 - tail);
  return out;
}

CurveEstimate summarize_curves(const Eigen::MatrixXd& draws, const Eigen::VectorXd& grid,
                               double level) {
  validate_level(level);
  if (draws.rows() == 0 || draws.cols() != grid.size())
    throw DataError("summarize_curves: draw matrix does not match the grid");
  CurveEstimate out;
  out.grid = grid;
  out.mean.resize(grid.size());
  out.lower.resize(grid.size());
  out.upper.resize(grid.size());
  const double tail = 0.5 * (1.0 - level);
  std::vector<double> column(static_cast<std::size_t>(draws.rows()));
  for (Eigen::Index g = 0; g < grid.size(); ++g) {
    for (Eigen::Index s = 0; s < draws.rows(); ++s)
      column[static_cast<std::size_t>(s)] = draws(s, g);
    out.mean[g] = stats::mean(column);
    std::sort(column.begin(), column.end());
    out.lower[g] = stats::quantile_sorted(column, tail);
    out.upper[g] = stats::quantile_sorted(column, 1.0 - tail);
  }
  return out;
}

Eigen::MatrixXd placement_values(const ddp::FitResult& fit, const data::Dataset& diseased) {
  if (diseased.size() == 0) throw DataError("placement_values: no diseased observations");
  if (fit.draws.empty()) throw DataError("placement_values: fit has no retained draws");
  const Eigen::Index n = static_cast<Eigen::Index>(diseased.size());
  const Eigen::Index s_total = static_cast<Eigen::Index>(fit.draws.size());

  Eigen::MatrixXd z(n, fit.design.q);
  for (Eigen::Index j = 0; j < n; ++j)
    z.row(j) = fit.design.row(diseased.row_lookup(static_cast<std::size_t>(j))).transpose();

  Eigen::MatrixXd u(s_total, n);
  for (Eigen::Index s = 0; s < s_total; ++s) {
    const ddp::PosteriorDraw& d = fit.draws[static_cast<std::size_t>(s)];
    for (Eigen::Index j = 0; j < n; ++j)
      u(s, j) = 1.0 - ddp::cond_cdf(d, z.row(j).transpose(), diseased.y[static_cast<std::size_t>(j)]);
  }
  return u;
}

Eigen::VectorXd bb_roc_curve(const Eigen::VectorXd& q, const Eigen::VectorXd& u,
                             const Eigen::VectorXd& grid) {
  validate_grid(grid);
  if (q.size() != u.size() || q.size() == 0)
    throw DataError("bb_roc_curve: weight/placement size mismatch");
  const std::vector<int> ord = sort_order(u);

  Eigen::VectorXd curve(grid.size());
  double acc = 0.0;
  std::size_t ptr = 0;
  for (Eigen::Index g = 0; g < grid.size(); ++g) {
    while (ptr < ord.size() && u[ord[ptr]] <= grid[g]) acc += q[ord[ptr++]];
    // placements never exceed 1, so the curve is identically 1 at t = 1; the
    // clamp removes the one-ulp spill of the normalized-weight sum elsewhere.
    curve[g] = grid[g] >= 1.0 ? 1.0 : std::min(acc, 1.0);
  }
  return curve;
}

double bb_paauc(double t0, const Eigen::VectorXd& q, const Eigen::VectorXd& u) {
  if (!(t0 > 0.0 && t0 <= 1.0)) throw DataError("bb_paauc: t0 must lie in (0, 1]");
  if (q.size() != u.size() || q.size() == 0)
    throw DataError("bb_paauc: weight/placement size mismatch");
  double acc = 0.0;
  for (Eigen::Index j = 0; j < q.size(); ++j) acc += q[j] * std::min(t0, u[j]);
  return std::max(0.0, t0 - acc);  // guard the one-ulp negative of a full sum
}

double bb_aauc(const Eigen::VectorXd& q, const Eigen::VectorXd& u) { return bb_paauc(1.0, q, u); }

ArocResult adjusted_roc(const ddp::FitResult& fit, const data::Dataset& diseased,
                        const ArocOptions& options, rng::RngStream& rng) {
  const Eigen::VectorXd grid =
      options.grid.size() > 0 ? options.grid : stats::linspace(0.0, 1.0, 101);
  validate_grid(grid);
  validate_level(options.level);

  const Eigen::MatrixXd u = placement_values(fit, diseased);
  const Eigen::Index s_total = u.rows();
  const Eigen::Index n = u.cols();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);

  Eigen::MatrixXd curve_draws(s_total, grid.size());
  ArocResult out;
  out.aauc_draws.resize(s_total);
  const Eigen::Index n_t0 = static_cast<Eigen::Index>(options.paauc_t0s.size());
  if (n_t0 > 0) out.paauc_draws.resize(s_total, n_t0);

  for (Eigen::Index s = 0; s < s_total; ++s) {
    const Eigen::VectorXd q = rng.dirichlet(ones);
    curve_draws.row(s) = bb_roc_curve(q, u.row(s).transpose(), grid).transpose();
    out.aauc_draws[s] = bb_aauc(q, u.row(s).transpose());
    for (Eigen::Index k = 0; k < n_t0; ++k)
      out.paauc_draws(s, k) =
          bb_paauc(options.paauc_t0s[static_cast<std::size_t>(k)], q, u.row(s).transpose());
  }

  out.curve = summarize_curves(curve_draws, grid, options.level);
  out.aauc = summarize(stats::to_vector(out.aauc_draws), options.level);
  for (Eigen::Index k = 0; k < n_t0; ++k)
    out.paauc.push_back(summarize(stats::to_vector(out.paauc_draws.col(k)), options.level));
  return out;
}

CurveEstimate bb_aroc(const Eigen::MatrixXd& u, const Eigen::VectorXd& grid, double level,
                      rng::RngStream& rng) {
  validate_grid(grid);
  validate_level(level);
  if (u.rows() == 0 || u.cols() == 0) throw DataError("bb_aroc: empty placement matrix");
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(u.cols());
  Eigen::MatrixXd curve_draws(u.rows(), grid.size());
  for (Eigen::Index s = 0; s < u.rows(); ++s) {
    const Eigen::VectorXd q = rng.dirichlet(ones);
    curve_draws.row(s) = bb_roc_curve(q, u.row(s).transpose(), grid).transpose();
  }
  return summarize_curves(curve_draws, grid, level);
}

double invert_mixture_cdf(const ddp::PosteriorDraw& draw, const Eigen::VectorXd& zrow, double p) {
  if (!(p > 0.0 && p < 1.0)) throw DataError("invert_mixture_cdf: p must lie in (0, 1)");
  double mu_min = std::numeric_limits<double>::infinity();
  double mu_max = -std::numeric_limits<double>::infinity();
  double sd_max = 0.0;
  for (Eigen::Index l = 0; l < draw.w.size(); ++l) {
    if (draw.w[l] <= 0.0) continue;
    const double mu = zrow.dot(draw.beta.row(l));
    mu_min = std::min(mu_min, mu);
    mu_max = std::max(mu_max, mu);
    sd_max = std::max(sd_max, std::sqrt(draw.sigma2[l]));
  }
  if (!std::isfinite(mu_min)) throw NumericalError("invert_mixture_cdf: no positive-weight component");

  double lo = mu_min - 8.0 * sd_max;
  double hi = mu_max + 8.0 * sd_max;
  for (int expand = 0; ddp::cond_cdf(draw, zrow, lo) > p && expand < 60; ++expand)
    lo -= (hi - lo);
  for (int expand = 0; ddp::cond_cdf(draw, zrow, hi) < p && expand < 60; ++expand)
    hi += (hi - lo);
  if (ddp::cond_cdf(draw, zrow, lo) > p || ddp::cond_cdf(draw, zrow, hi) < p)
    throw NumericalError("invert_mixture_cdf: failed to bracket the quantile");

  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // interval at floating-point resolution
    (ddp::cond_cdf(draw, zrow, mid) >= p ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

Eigen::VectorXd threshold_draws(const ddp::FitResult& fit, const Eigen::VectorXd& zrow, double t) {
  if (!(t > 0.0 && t < 1.0))
    throw DataError("threshold_draws: false positive fraction must lie in (0, 1)");
  Eigen::VectorXd c(static_cast<Eigen::Index>(fit.draws.size()));
  for (std::size_t s = 0; s < fit.draws.size(); ++s)
    c[static_cast<Eigen::Index>(s)] = invert_mixture_cdf(fit.draws[s], zrow, 1.0 - t);
  return c;
}

ScalarEstimate covariate_threshold(const ddp::FitResult& fit, const Eigen::VectorXd& zrow,
                                   double t, double level) {
  return summarize(stats::to_vector(threshold_draws(fit, zrow, t)), level);
}

namespace {

// smallest index k with cum[k] >= p (cum is a nondecreasing prefix-mass array);
// a small fuzz keeps exact-step probabilities from falling on the wrong side
std::size_t lower_index(const std::vector<double>& cum, double p) {
  const auto it = std::lower_bound(cum.begin(), cum.end(), p - 1e-12);
  return static_cast<std::size_t>(it - cum.begin());
}

}  // namespace

Eigen::VectorXd pooled_roc_empirical(std::vector<double> y_nondiseased,
                                     std::vector<double> y_diseased,
                                     const Eigen::VectorXd& grid) {
  validate_grid(grid);
  if (y_nondiseased.empty() || y_diseased.empty())
    throw DataError("pooled_roc_empirical: both groups need observations");
  std::sort(y_nondiseased.begin(), y_nondiseased.end());
  std::sort(y_diseased.begin(), y_diseased.end());
  const double n0 = static_cast<double>(y_nondiseased.size());
  const double n1 = static_cast<double>(y_diseased.size());

  Eigen::VectorXd roc(grid.size());
  for (Eigen::Index g = 0; g < grid.size(); ++g) {
    const double p = 1.0 - grid[g];
    if (p <= 0.0) {
      roc[g] = 1.0;  // threshold below every observation
      continue;
    }
    // right-continuous inverse: smallest order statistic with ecdf >= p
    const auto k = static_cast<std::size_t>(std::ceil(p * n0 - 1e-9));
    const double c = y_nondiseased[std::min(k == 0 ? 0 : k - 1, y_nondiseased.size() - 1)];
    const auto below = std::upper_bound(y_diseased.begin(), y_diseased.end(), c);
    roc[g] = 1.0 - static_cast<double>(below - y_diseased.begin()) / n1;
  }
  return roc;
}

PooledResult pooled_roc_bb(std::vector<double> y_nondiseased, std::vector<double> y_diseased,
                           const Eigen::VectorXd& grid, int n_boot, double level,
                           rng::RngStream& rng) {
  validate_grid(grid);
  validate_level(level);
  if (n_boot < 2) throw DataError("pooled_roc_bb: need at least two bootstrap draws");
  if (y_nondiseased.empty() || y_diseased.empty())
    throw DataError("pooled_roc_bb: both groups need observations");
  std::sort(y_nondiseased.begin(), y_nondiseased.end());
  std::sort(y_diseased.begin(), y_diseased.end());
  const std::size_t n0 = y_nondiseased.size();
  const std::size_t n1 = y_diseased.size();
  const Eigen::VectorXd ones0 = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n0));
  const Eigen::VectorXd ones1 = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n1));

  Eigen::MatrixXd curve_draws(n_boot, grid.size());
  PooledResult out;
  out.auc_draws.resize(n_boot);
  std::vector<double> cum0(n0), cum1(n1);

  for (int b = 0; b < n_boot; ++b) {
    const Eigen::VectorXd p = rng.dirichlet(ones0);
    const Eigen::VectorXd q = rng.dirichlet(ones1);
    double acc = 0.0;
    for (std::size_t i = 0; i < n0; ++i) cum0[i] = (acc += p[static_cast<Eigen::Index>(i)]);
    acc = 0.0;
    for (std::size_t j = 0; j < n1; ++j) cum1[j] = (acc += q[static_cast<Eigen::Index>(j)]);

    for (Eigen::Index g = 0; g < grid.size(); ++g) {
      const double prob = 1.0 - grid[g];
      if (prob <= 0.0) {
        curve_draws(b, g) = 1.0;
        continue;
      }
      const std::size_t k = std::min(lower_index(cum0, prob), n0 - 1);
      const double c = y_nondiseased[k];
      const auto below = std::upper_bound(y_diseased.begin(), y_diseased.end(), c);
      const std::size_t m = static_cast<std::size_t>(below - y_diseased.begin());
      curve_draws(b, g) = 1.0 - (m == 0 ? 0.0 : cum1[m - 1]);
    }

    // placement form of the weighted AUC: sum_j q_j F_p(y_j), the weighted
    // probability that a diseased marker exceeds a nondiseased one
    double auc = 0.0;
    for (std::size_t j = 0; j < n1; ++j) {
      const auto below = std::upper_bound(y_nondiseased.begin(), y_nondiseased.end(),
                                          y_diseased[j]);
      const std::size_t m = static_cast<std::size_t>(below - y_nondiseased.begin());
      auc += q[static_cast<Eigen::Index>(j)] * (m == 0 ? 0.0 : cum0[m - 1]);
    }
    out.auc_draws[b] = auc;
  }

  out.curve = summarize_curves(curve_draws, grid, level);
  out.auc = summarize(stats::to_vector(out.auc_draws), level);
  return out;
}

}  // namespace aroc::curves
