#include "aroc/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aroc/common.hpp"
#include "aroc/stats.hpp"

namespace aroc::kernel {

namespace {

void check_xy(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DataError("kernel: x and y length mismatch");
  if (x.size() < 3) throw DataError("kernel: need at least 3 observations");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw DataError("kernel: non-finite observation");
  }
}

// Nearest neighbor by |x_i - x0|; ties go to the smaller response so the
// result cannot depend on observation order.
double nearest_response(const std::vector<double>& x, const std::vector<double>& y, double x0) {
  double best_d = std::numeric_limits<double>::infinity();
  double best_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = std::abs(x[i] - x0);
    if (d < best_d || (d == best_d && y[i] < best_y)) {
      best_d = d;
      best_y = y[i];
    }
  }
  return best_y;
}

}  // namespace

double nw_eval(const std::vector<double>& x, const std::vector<double>& y, double h, double x0,
               int* fallbacks) {
  check_xy(x, y);
  if (!(h > 0.0) || !std::isfinite(h)) throw DataError("kernel: bandwidth must be positive");
  const std::size_t n = x.size();
  std::vector<double> num(n), den(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (x[i] - x0) / h;
    const double w = std::exp(-0.5 * t * t);
    den[i] = w;
    num[i] = w * y[i];
  }
  const double d = stats::sum_sorted(den);
  if (!(d > 0.0)) {
    if (fallbacks) ++*fallbacks;
    return nearest_response(x, y, x0);
  }
  return stats::sum_sorted(num) / d;
}

Eigen::VectorXd nw_regress(const std::vector<double>& x, const std::vector<double>& y, double h,
                           const std::vector<double>& x_eval, int* fallbacks) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(x_eval.size()));
  for (std::size_t k = 0; k < x_eval.size(); ++k)
    out[static_cast<Eigen::Index>(k)] = nw_eval(x, y, h, x_eval[k], fallbacks);
  return out;
}

std::vector<double> bandwidth_grid(const std::vector<double>& x) {
  if (x.size() < 3) throw DataError("kernel: need at least 3 observations");
  const double s = stats::sd(x);
  if (!(s > 0.0)) throw DataError("kernel: covariate is constant");
  const double n = static_cast<double>(x.size());
  const double h_ref = 1.06 * s * std::pow(n, -0.2);
  const double lo = h_ref / 20.0;
  const double hi = 20.0 * h_ref;
  const int m = 40;
  std::vector<double> grid(m);
  const double step = (std::log(hi) - std::log(lo)) / (m - 1);
  for (int k = 0; k < m; ++k) grid[k] = std::exp(std::log(lo) + step * k);
  return grid;
}

double lscv_score(const std::vector<double>& x, const std::vector<double>& y, double h) {
  check_xy(x, y);
  if (!(h > 0.0) || !std::isfinite(h)) throw DataError("kernel: bandwidth must be positive");
  const std::size_t n = x.size();
  std::vector<double> num, den, errs(n);
  num.reserve(n - 1);
  den.reserve(n - 1);
  std::vector<double> xo, yo;
  xo.reserve(n - 1);
  yo.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    num.clear();
    den.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double t = (x[j] - x[i]) / h;
      const double w = std::exp(-0.5 * t * t);
      den.push_back(w);
      // Leave-one-out residual in difference form: a constant response gives
      // an exactly zero error at every bandwidth, so the tie-break below is
      // deterministic rather than at the mercy of rounding.
      num.push_back(w * (y[i] - y[j]));
    }
    const double d = stats::sum_sorted(den);
    double e;
    if (d > 0.0) {
      e = stats::sum_sorted(num) / d;
    } else {
      xo.clear();
      yo.clear();
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        xo.push_back(x[j]);
        yo.push_back(y[j]);
      }
      e = y[i] - nearest_response(xo, yo, x[i]);
    }
    errs[i] = e * e;
  }
  return stats::sum_sorted(errs) / static_cast<double>(n);
}

double lscv_bandwidth(const std::vector<double>& x, const std::vector<double>& y,
                      const std::vector<double>& grid) {
  if (grid.empty()) throw DataError("kernel: empty bandwidth grid");
  double best_h = grid[0];
  double best_score = std::numeric_limits<double>::infinity();
  for (double h : grid) {
    const double s = lscv_score(x, y, h);
    if (s < best_score) {  // strict: exact ties keep the smaller bandwidth
      best_score = s;
      best_h = h;
    }
  }
  return best_h;
}

double lscv_bandwidth(const std::vector<double>& x, const std::vector<double>& y) {
  return lscv_bandwidth(x, y, bandwidth_grid(x));
}

double LocationScaleFit::mean_at(double x0) const { return nw_eval(x, y, h_mean, x0); }

double LocationScaleFit::var_at(double x0) const {
  return std::max(nw_eval(x, sq_residuals, h_var, x0), variance_floor);
}

double LocationScaleFit::residual_ecdf(double e) const {
  const auto it = std::upper_bound(sorted_residuals.begin(), sorted_residuals.end(), e);
  return static_cast<double>(it - sorted_residuals.begin()) /
         static_cast<double>(sorted_residuals.size());
}

double LocationScaleFit::cdf(double yv, double x0) const {
  return residual_ecdf((yv - mean_at(x0)) / std::sqrt(var_at(x0)));
}

LocationScaleFit fit_location_scale(const std::vector<double>& x, const std::vector<double>& y,
                                    double h_mean, double h_var) {
  check_xy(x, y);
  if (!(h_mean > 0.0) || !(h_var > 0.0)) throw DataError("kernel: bandwidth must be positive");
  const double var_y = stats::variance(y);
  if (!(var_y > 0.0)) throw DataError("kernel: response is constant");

  LocationScaleFit fit;
  fit.h_mean = h_mean;
  fit.h_var = h_var;
  fit.x = x;
  fit.y = y;
  fit.variance_floor = 1e-10 * var_y;

  const std::size_t n = x.size();
  fit.sq_residuals.resize(n);
  std::vector<double> raw(n);
  for (std::size_t i = 0; i < n; ++i) {
    raw[i] = y[i] - nw_eval(x, y, h_mean, x[i], &fit.nw_fallbacks);
    fit.sq_residuals[i] = raw[i] * raw[i];
  }
  fit.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = nw_eval(x, fit.sq_residuals, h_var, x[i], &fit.nw_fallbacks);
    if (v < fit.variance_floor) {
      v = fit.variance_floor;
      ++fit.floor_hits;
    }
    fit.residuals[i] = raw[i] / std::sqrt(v);
  }
  fit.sorted_residuals = fit.residuals;
  std::sort(fit.sorted_residuals.begin(), fit.sorted_residuals.end());
  return fit;
}

LocationScaleFit fit_location_scale(const std::vector<double>& x, const std::vector<double>& y) {
  check_xy(x, y);
  const double h_mean = lscv_bandwidth(x, y);
  std::vector<double> e2(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - nw_eval(x, y, h_mean, x[i]);
    e2[i] = e * e;
  }
  // The variance bandwidth gets its own LSCV pass, run on the squared
  // residuals from the full-sample mean fit.
  const double h_var = lscv_bandwidth(x, e2);
  return fit_location_scale(x, y, h_mean, h_var);
}

namespace {

std::vector<double> placement_from_fit(const LocationScaleFit& fit, const std::vector<double>& xd,
                                       const std::vector<double>& yd) {
  std::vector<double> u(yd.size());
  for (std::size_t j = 0; j < yd.size(); ++j) u[j] = 1.0 - fit.cdf(yd[j], xd[j]);
  return u;
}

// Empirical curve of the placement values: exact counts over n, so the value
// at t = 1 is exactly 1 and shuffling observations cannot move a single bit.
Eigen::VectorXd flat_roc_curve(std::vector<double> u, const Eigen::VectorXd& grid) {
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  Eigen::VectorXd out(grid.size());
  for (Eigen::Index k = 0; k < grid.size(); ++k) {
    const auto it = std::upper_bound(u.begin(), u.end(), grid[k]);
    out[k] = static_cast<double>(it - u.begin()) / n;
  }
  return out;
}

double flat_aauc(const std::vector<double>& u) { return 1.0 - stats::mean(u); }

}  // namespace

KernelArocResult kernel_aroc(const std::vector<double>& x_nondiseased,
                             const std::vector<double>& y_nondiseased,
                             const std::vector<double>& x_diseased,
                             const std::vector<double>& y_diseased,
                             const Eigen::VectorXd& grid, int n_boot, double level,
                             rng::RngStream& rng) {
  check_xy(x_nondiseased, y_nondiseased);
  check_xy(x_diseased, y_diseased);
  if (n_boot < 1) throw DataError("kernel: need at least one bootstrap resample");

  KernelArocResult res;
  LocationScaleFit fit = fit_location_scale(x_nondiseased, y_nondiseased);
  res.h_mean = fit.h_mean;
  res.h_var = fit.h_var;
  res.floor_hits = fit.floor_hits;
  res.nw_fallbacks = fit.nw_fallbacks;

  const std::size_t n0 = y_nondiseased.size();
  const std::size_t n1 = y_diseased.size();
  const Eigen::Index g = grid.size();

  // Point estimate: flat-weight empirical curve of the placement values.
  const std::vector<double> u_hat = placement_from_fit(fit, x_diseased, y_diseased);
  const Eigen::VectorXd point_curve = flat_roc_curve(u_hat, grid);
  const double point_aauc = flat_aauc(u_hat);

  // Precompute mu and sigma at the nondiseased design points once; every
  // resample reuses them together with the original-sample bandwidths.
  std::vector<double> mu0(n0), sd0(n0);
  for (std::size_t i = 0; i < n0; ++i) {
    mu0[i] = fit.mean_at(x_nondiseased[i]);
    sd0[i] = std::sqrt(fit.var_at(x_nondiseased[i]));
  }

  Eigen::MatrixXd boot_curves(n_boot, g);
  Eigen::VectorXd boot_aauc(n_boot);
  std::vector<double> yb(n0), xd(n1), yd(n1);
  for (int b = 0; b < n_boot; ++b) {
    rng::RngStream child = rng.child(static_cast<std::uint64_t>(b));
    // Residual bootstrap in the nondiseased group, refit with original
    // bandwidths.
    for (std::size_t i = 0; i < n0; ++i) {
      const std::size_t k = std::min<std::size_t>(
          n0 - 1, static_cast<std::size_t>(child.uniform01() * static_cast<double>(n0)));
      yb[i] = mu0[i] + sd0[i] * fit.residuals[k];
    }
    LocationScaleFit refit = fit_location_scale(x_nondiseased, yb, fit.h_mean, fit.h_var);
    res.floor_hits += refit.floor_hits;
    res.nw_fallbacks += refit.nw_fallbacks;
    // Resample cases in the diseased group.
    for (std::size_t j = 0; j < n1; ++j) {
      const std::size_t k = std::min<std::size_t>(
          n1 - 1, static_cast<std::size_t>(child.uniform01() * static_cast<double>(n1)));
      xd[j] = x_diseased[k];
      yd[j] = y_diseased[k];
    }
    const std::vector<double> ub = placement_from_fit(refit, xd, yd);
    boot_curves.row(b) = flat_roc_curve(ub, grid).transpose();
    boot_aauc[b] = flat_aauc(ub);
  }

  curves::CurveEstimate band = curves::summarize_curves(boot_curves, grid, level);
  res.curve.grid = grid;
  res.curve.mean = point_curve;
  res.curve.lower = band.lower;
  res.curve.upper = band.upper;

  curves::ScalarEstimate a = curves::summarize(stats::to_vector(boot_aauc), level);
  res.aauc.mean = point_aauc;
  res.aauc.lower = a.lower;
  res.aauc.upper = a.upper;
  res.aauc_draws = boot_aauc;
  return res;
}

KernelArocResult kernel_aroc(const data::Dataset& data, const Eigen::VectorXd& grid, int n_boot,
                             double level, rng::RngStream& rng) {
  if (data.covariates.size() != 1)
    throw DataError("kernel: requires exactly one continuous covariate, got " +
                    std::to_string(data.covariates.size()));
  const auto& name = data.covariates.begin()->first;
  std::vector<double> x0, y0, x1, y1;
  for (std::size_t i = 0; i < data.y.size(); ++i) {
    if (data.status[i] == 0) {
      x0.push_back(data.covariates.at(name)[i]);
      y0.push_back(data.y[i]);
    } else {
      x1.push_back(data.covariates.at(name)[i]);
      y1.push_back(data.y[i]);
    }
  }
  return kernel_aroc(x0, y0, x1, y1, grid, n_boot, level, rng);
}

}  // namespace aroc::kernel
