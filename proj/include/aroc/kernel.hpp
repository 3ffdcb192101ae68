#pragma once

#include <Eigen/Dense>
#include <vector>

#include "aroc/curves.hpp"
#include "aroc/dataset.hpp"
#include "aroc/rng.hpp"

namespace aroc::kernel {

// Frequentist competitor: a kernel location-scale model for the nondiseased
// marker, y = mu(x) + sigma(x) eps with eps ~ F_eps, all three pieces
// estimated nonparametrically (Nadaraya-Watson mean, NW regression of squared
// residuals for the variance, empirical cdf of standardized residuals).
// Single continuous covariate only.

// Gaussian-kernel NW estimate at x0.  Summands are accumulated in sorted
// order, so results are bitwise invariant under shuffling of (x, y) pairs.
// If every kernel weight underflows to zero, the value falls back to the
// nearest neighbor's response and *fallbacks (when given) is incremented.
double nw_eval(const std::vector<double>& x, const std::vector<double>& y, double h, double x0,
               int* fallbacks = nullptr);
Eigen::VectorXd nw_regress(const std::vector<double>& x, const std::vector<double>& y, double h,
                           const std::vector<double>& x_eval, int* fallbacks = nullptr);

// 40 log-spaced bandwidths on [h_ref/20, 20 h_ref] around the normal
// reference rule h_ref = 1.06 sd(x) n^{-1/5}.
std::vector<double> bandwidth_grid(const std::vector<double>& x);

// Mean leave-one-out squared prediction error of the NW estimate.
double lscv_score(const std::vector<double>& x, const std::vector<double>& y, double h);

// Grid minimizer of lscv_score; exact ties go to the smallest bandwidth
// (constant y therefore returns the grid minimum).
double lscv_bandwidth(const std::vector<double>& x, const std::vector<double>& y,
                      const std::vector<double>& grid);
double lscv_bandwidth(const std::vector<double>& x, const std::vector<double>& y);

struct LocationScaleFit {
  double h_mean = 0.0;
  double h_var = 0.0;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> sq_residuals;       // raw (y_i - mu(x_i))^2, data order
  std::vector<double> residuals;          // standardized, data order
  std::vector<double> sorted_residuals;   // for the residual ecdf
  double variance_floor = 0.0;            // 1e-10 * Var(y)
  int floor_hits = 0;                     // fit-time variance floorings
  int nw_fallbacks = 0;                   // fit-time total-underflow fallbacks

  double mean_at(double x0) const;
  double var_at(double x0) const;         // floored, strictly positive
  double residual_ecdf(double e) const;   // values in {0, 1/n, ..., 1}
  double cdf(double yv, double x0) const; // F(y | x) via the residual ecdf
};

// Bandwidths by LSCV (first form) or supplied (second form, used by the
// bootstrap so every resample reuses the original-sample bandwidths).
LocationScaleFit fit_location_scale(const std::vector<double>& x, const std::vector<double>& y);
LocationScaleFit fit_location_scale(const std::vector<double>& x, const std::vector<double>& y,
                                    double h_mean, double h_var);

struct KernelArocResult {
  curves::CurveEstimate curve;   // mean = point estimate, band = bootstrap percentiles
  curves::ScalarEstimate aauc;   // same convention
  Eigen::VectorXd aauc_draws;
  double h_mean = 0.0;
  double h_var = 0.0;
  int floor_hits = 0;            // accumulated over the point fit and refits
  int nw_fallbacks = 0;
};

// Point estimate from the original sample; band from n_boot resamples, each
// combining a residual bootstrap + refit in the nondiseased group with
// resampled cases in the diseased group.  Resample b runs on rng.child(b),
// so results do not depend on evaluation order.
KernelArocResult kernel_aroc(const std::vector<double>& x_nondiseased,
                             const std::vector<double>& y_nondiseased,
                             const std::vector<double>& x_diseased,
                             const std::vector<double>& y_diseased,
                             const Eigen::VectorXd& grid, int n_boot, double level,
                             rng::RngStream& rng);

// Dataset convenience: requires exactly one covariate column.
KernelArocResult kernel_aroc(const data::Dataset& data, const Eigen::VectorXd& grid, int n_boot,
                             double level, rng::RngStream& rng);

}  // namespace aroc::kernel
