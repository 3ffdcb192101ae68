#pragma once

#include <Eigen/Dense>
#include <vector>

#include "aroc/ddp.hpp"
#include "aroc/rng.hpp"

namespace aroc::modelcrit {

// Predictive model-comparison criteria computed from the S x n matrix of
// pointwise conditional log densities logf(s, i) = log f(y_i | x_i, draw s).
//
//   log CPO_i = -( logsumexp_s(-logf_si) - log S )      (harmonic-mean identity)
//   LPML      = sum_i log CPO_i
//   lppd_i    = logsumexp_s(logf_si) - log S
//   p_i       = Var_s(logf_si)                           (sample variance, S - 1)
//   WAIC      = -2 (sum_i lppd_i - sum_i p_i)
//
// All reductions sort their summands first, so every result is exactly
// invariant under permutations of draws and of observations.
struct CriteriaReport {
  double lpml = 0.0;
  double waic = 0.0;
  double lppd = 0.0;
  double p_waic = 0.0;
  std::vector<double> log_cpo;
};

CriteriaReport criteria_from_logf(const Eigen::MatrixXd& logf);
CriteriaReport criteria(const ddp::FitResult& fit);

// Posterior predictive checks: per retained draw, a replicate data set is
// simulated at the fitted covariate rows and its moment-based skewness and
// kurtosis (normal reference 3) are compared with the observed sample.
// P-values are P(T_rep >= T_obs).
struct PredictiveChecks {
  double observed_skewness = 0.0;
  double observed_kurtosis = 0.0;
  std::vector<double> replicate_skewness;
  std::vector<double> replicate_kurtosis;
  double pvalue_skewness = 0.0;
  double pvalue_kurtosis = 0.0;
};

PredictiveChecks posterior_predictive_stats(const ddp::FitResult& fit, rng::RngStream& rng);

}  // namespace aroc::modelcrit
