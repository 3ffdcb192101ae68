#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "aroc/dataset.hpp"
#include "aroc/rng.hpp"
#include "aroc/splines.hpp"

namespace aroc::ddp {

// Dependent mixture of normal linear models with truncated stick-breaking
// weights:
//
//   F(y | x) = sum_{l=1}^L w_l Phi(y | z(x)' beta_l, sigma2_l)
//   w_l = v_l prod_{r<l} (1 - v_r),  v_l ~ Beta(1, alpha),  v_L = 1
//   beta_l ~ N_q(m, S),  1/sigma2_l ~ Gamma(a, b)          [rate b]
//   m ~ N_q(m0, S0),     S^{-1} ~ Wishart(nu, (nu Psi)^{-1})  [E S^{-1} = Psi^{-1}]
//
// Fitting uses a blocked Gibbs sampler over allocations, stick fractions,
// component parameters, and the (m, S^{-1}) hyperparameters.

struct PriorSpec {
  Eigen::VectorXd m0;
  Eigen::MatrixXd s0;
  double nu = 0.0;
  Eigen::MatrixXd psi;
  double a = 2.0;
  double b = 0.5;
  double alpha = 1.0;
  int components = 10;  // truncation level L
};

// Weakly informative default for a design with q columns, intended for a
// response standardized to unit scale: m0 = 0, S0 = 100 I, nu = q + 2,
// Psi = I, a = 2, b = 0.5, alpha = 1.
PriorSpec default_prior(int q, int components = 10);

// Expected prior mass beyond the truncation level, E[1 - sum_{l<=L} w_l]
// = (alpha / (alpha + 1))^L.  Guides the choice of L.
double truncation_bound(double alpha, int components);

// Expected number of distinct clusters among n observations under the
// (untruncated) Dirichlet process prior: sum_{i=1}^n alpha / (alpha + i - 1).
double prior_expected_clusters(double alpha, std::size_t n);

struct GibbsConfig {
  int nsim = 10000;  // total sweeps
  int nburn = 2000;  // discarded sweeps; retained draws = nsim - nburn
  // Standardize the response by its sample standard deviation before
  // sampling (draws are mapped back to the data scale when stored).
  bool scale_response = true;
  // When false, (m, S^{-1}) are held at their initial values.
  bool update_hyper = true;
  // When positive, every component variance is held at this value
  // (interpreted on the data scale).
  double fix_sigma2 = 0.0;
  // Optional initial values for the hyperparameters; prior draws otherwise.
  std::optional<Eigen::VectorXd> init_m;
  std::optional<Eigen::MatrixXd> init_s_inv;
};

// One retained sweep, on the data scale.
struct PosteriorDraw {
  Eigen::VectorXd w;       // L
  Eigen::MatrixXd beta;    // L x q
  Eigen::VectorXd sigma2;  // L
  Eigen::VectorXd m;       // q
  Eigen::MatrixXd s_inv;   // q x q
};

struct FitResult {
  splines::ModelDesign design;
  PriorSpec prior;
  GibbsConfig config;
  double response_scale = 1.0;      // sd used to standardize the response
  Eigen::MatrixXd z;                // n x q design matrix of the fitted data
  Eigen::VectorXd y;                // fitted responses (data scale)
  std::vector<PosteriorDraw> draws;
  std::vector<int> occupied;        // non-empty components per retained sweep
};

// Working state of the sampler (on the standardized scale).  Exposed so the
// individual updates can be exercised directly.
struct GibbsState {
  std::vector<int> alloc;  // 0-based component index per observation
  Eigen::VectorXd v;       // stick fractions, v[L-1] == 1
  Eigen::VectorXd w;       // weights implied by v
  Eigen::MatrixXd beta;    // L x q
  Eigen::VectorXd sigma2;  // L
  Eigen::VectorXd m;       // q
  Eigen::MatrixXd s_inv;   // q x q
};

// --- closed-form full conditionals (pure; no sampling) ---

Eigen::VectorXd stick_weights(const Eigen::VectorXd& v);

std::vector<int> allocation_counts(const std::vector<int>& alloc, int components);

// Beta(n_l + 1, alpha + sum_{r>l} n_r) parameters for stick fraction l.
std::pair<double, double> stick_beta_params(const std::vector<int>& counts, double alpha, int l);

struct GaussianConditional {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// N(V (S^{-1} m + sigma^{-2} Z_l' y_l), V), V = (S^{-1} + sigma^{-2} Z_l'Z_l)^{-1},
// where Z_l, y_l are the rows currently allocated to component l.
GaussianConditional beta_full_conditional(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                                          const std::vector<int>& alloc, int l, double sigma2,
                                          const Eigen::VectorXd& m, const Eigen::MatrixXd& s_inv);

// Gamma(a + n_l / 2, b + sum resid^2 / 2) parameters (shape, rate) for 1/sigma2_l.
std::pair<double, double> sigma2_gamma_params(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                                              const std::vector<int>& alloc, int l,
                                              const Eigen::VectorXd& beta_l, double a, double b);

// N(V (S0^{-1} m0 + S^{-1} sum_l beta_l), V), V = (S0^{-1} + L S^{-1})^{-1}.
GaussianConditional hyper_mean_full_conditional(const Eigen::MatrixXd& beta,
                                                const Eigen::MatrixXd& s_inv,
                                                const Eigen::VectorXd& m0,
                                                const Eigen::MatrixXd& s0);

struct WishartParams {
  double df;
  Eigen::MatrixXd inv_scale;  // draw is Wishart(df, inv_scale^{-1})
};

// Wishart(nu + L, (nu Psi + sum_l (beta_l - m)(beta_l - m)')^{-1}) for S^{-1}.
WishartParams hyper_prec_wishart_params(const Eigen::MatrixXd& beta, const Eigen::VectorXd& m,
                                        double nu, const Eigen::MatrixXd& psi);

// --- Gibbs updates (one sweep = the four calls below, in order) ---

void update_allocations(GibbsState& state, const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                        rng::RngStream& rng);
void update_stick_weights(GibbsState& state, double alpha, rng::RngStream& rng);
// Empty components are refreshed from the base measure; fix_sigma2 > 0 holds
// every component variance at that value (standardized scale here).
void update_components(GibbsState& state, const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                       const PriorSpec& prior, double fix_sigma2, rng::RngStream& rng);
void update_hyperparams(GibbsState& state, const PriorSpec& prior, rng::RngStream& rng);

// --- fitting ---

FitResult gibbs_fit(splines::ModelDesign design, Eigen::MatrixXd z, Eigen::VectorXd y,
                    const PriorSpec& prior, const GibbsConfig& config, rng::RngStream& rng);

// Builds the design from `spec` on `fit_data` (knots placed at covariate
// quantiles of these rows) and fits the mixture to its responses.
FitResult gibbs_fit(const data::Dataset& fit_data, const splines::ModelSpec& spec,
                    const PriorSpec& prior, const GibbsConfig& config, rng::RngStream& rng);

// --- posterior conditional functionals, per retained draw ---

// F(y | x) = sum_l w_l Phi(y | z' beta_l, sigma2_l)
double cond_cdf(const PosteriorDraw& draw, const Eigen::VectorXd& zrow, double y);
// log f(y | x), evaluated stably in log space
double cond_logpdf(const PosteriorDraw& draw, const Eigen::VectorXd& zrow, double y);
// one simulated response at covariate row z
double cond_sample(const PosteriorDraw& draw, const Eigen::VectorXd& zrow, rng::RngStream& rng);

}  // namespace aroc::ddp
