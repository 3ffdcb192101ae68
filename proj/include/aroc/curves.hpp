#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "aroc/dataset.hpp"
#include "aroc/ddp.hpp"
#include "aroc/rng.hpp"

namespace aroc::curves {

// Covariate-adjusted ROC machinery.  The fitted conditional distribution of
// the nondiseased marker yields, for every retained posterior draw s and
// diseased observation j, the placement value
//
//   U_j^(s) = 1 - F^(s)(y_j | x_j),
//
// i.e. how far into the healthy tail the diseased marker falls.  The adjusted
// ROC curve is the cdf of U; it is estimated per draw with a Bayesian
// bootstrap: q ~ Dirichlet(1,...,1) over the diseased sample and
//
//   AROC^(s)(t)   = sum_j q_j 1(U_j <= t)
//   AAUC^(s)      = 1 - sum_j q_j U_j
//   pAAUC^(s)(t0) = t0 - sum_j q_j min(t0, U_j)

struct CurveEstimate {
  Eigen::VectorXd grid;
  Eigen::VectorXd mean;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct ScalarEstimate {
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

ScalarEstimate summarize(std::vector<double> draws, double level);
CurveEstimate summarize_curves(const Eigen::MatrixXd& draws,  // S x G
                               const Eigen::VectorXd& grid, double level);

// S x n_D matrix of placement values, one row per retained draw.
Eigen::MatrixXd placement_values(const ddp::FitResult& fit, const data::Dataset& diseased);

// One Bayesian-bootstrap realization of the curve/summaries given weights q
// and placement values u (both length n_D).
Eigen::VectorXd bb_roc_curve(const Eigen::VectorXd& q, const Eigen::VectorXd& u,
                             const Eigen::VectorXd& grid);
double bb_paauc(double t0, const Eigen::VectorXd& q, const Eigen::VectorXd& u);
// The full area is the partial area up to 1 (identical accumulation order,
// so the two agree bitwise).
double bb_aauc(const Eigen::VectorXd& q, const Eigen::VectorXd& u);

struct ArocOptions {
  Eigen::VectorXd grid;  // defaults to 101 equally spaced points on [0, 1]
  double level = 0.95;
  std::vector<double> paauc_t0s;  // partial areas to report, each in (0, 1]
};

struct ArocResult {
  CurveEstimate curve;
  ScalarEstimate aauc;
  std::vector<ScalarEstimate> paauc;  // one per requested t0
  Eigen::VectorXd aauc_draws;
  Eigen::MatrixXd paauc_draws;  // draws x t0s, empty unless paauc_t0s given
};

// Full pipeline: placement values from the fit, one Bayesian-bootstrap
// realization per posterior draw, pointwise percentile bands.
ArocResult adjusted_roc(const ddp::FitResult& fit, const data::Dataset& diseased,
                        const ArocOptions& options, rng::RngStream& rng);

// Curve summary straight from a placement matrix (one Dirichlet weight vector
// per row), for callers that already have U.
CurveEstimate bb_aroc(const Eigen::MatrixXd& u, const Eigen::VectorXd& grid, double level,
                      rng::RngStream& rng);

// --- covariate-specific thresholds ---

// Solve sum_l w_l Phi(c | z'beta_l, sigma2_l) = p for c by bisection
// (absolute tolerance ~1e-10; the mixture cdf is strictly increasing).
double invert_mixture_cdf(const ddp::PosteriorDraw& draw, const Eigen::VectorXd& zrow, double p);

// Threshold c^(s) with false positive fraction t at covariate row z, i.e. the
// (1 - t) quantile of the nondiseased conditional, one value per draw.
Eigen::VectorXd threshold_draws(const ddp::FitResult& fit, const Eigen::VectorXd& zrow, double t);

// Ensemble summary of the covariate-specific threshold at FPF t.
ScalarEstimate covariate_threshold(const ddp::FitResult& fit, const Eigen::VectorXd& zrow,
                                   double t, double level);

// --- covariate-free pooled ROC (reference/comparison) ---

// Empirical pooled ROC(t) = 1 - F_D(F_{nonD}^{-1}(1 - t)) with the
// right-continuous inverse.
Eigen::VectorXd pooled_roc_empirical(std::vector<double> y_nondiseased,
                                     std::vector<double> y_diseased,
                                     const Eigen::VectorXd& grid);

struct PooledResult {
  CurveEstimate curve;
  ScalarEstimate auc;
  Eigen::VectorXd auc_draws;
};

// Bayesian-bootstrap pooled ROC: independent flat Dirichlet weights over each
// group, B realizations, percentile bands.
PooledResult pooled_roc_bb(std::vector<double> y_nondiseased, std::vector<double> y_diseased,
                           const Eigen::VectorXd& grid, int n_boot, double level,
                           rng::RngStream& rng);

}  // namespace aroc::curves
