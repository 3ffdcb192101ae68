#pragma once

// Seedable random streams and the variate samplers used by the samplers and
// simulation harness. A stream is identified by (seed, stream-id); replicate k
// of a study always uses child stream k, so results are independent of thread
// count and execution order. All transforms from raw engine output to variates
// are implemented here (inverse-CDF normal, Marsaglia-Tsang gamma, Bartlett
// Wishart, ...) so sequences depend only on the fully-specified mt19937_64,
// never on library-specific std::*_distribution internals.

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace aroc::rng {

// ===== standard normal special functions =====

// Phi(x). Absolute error well below 1e-12 (erfc based). Rejects non-finite x.
double std_normal_cdf(double x);

// Phi^{-1}(p) for p in (0,1): rational minimax approximation polished by one
// guarded Newton step. Rejects p outside the open interval.
double std_normal_quantile(double p);

// log phi(x), the standard normal log density.
inline double std_normal_logpdf(double x) {
  static constexpr double kLogSqrt2Pi = 0.91893853320467274178;
  return -0.5 * x * x - kLogSqrt2Pi;
}

// ===== skew normal parametrizations =====

struct SkewNormalParams {
  double xi = 0.0;     // location
  double omega = 1.0;  // scale (> 0)
  double lambda = 0.0; // shape
};

// Convert a target (mean, variance, shape) to direct parameters:
// delta = lambda/sqrt(1+lambda^2), omega^2 = var/(1 - 2 delta^2/pi),
// xi = mean - omega delta sqrt(2/pi).
SkewNormalParams skew_normal_from_moments(double mean, double variance, double lambda);

// ===== seeded stream =====

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  // Deterministically derived independent substream; child(k) is the same
  // stream no matter which thread asks for it.
  RngStream child(std::uint64_t k) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  // Strictly inside (0,1); 53 random bits.
  double uniform01();

  double normal(double mean = 0.0, double sd = 1.0);

  // Shape/rate parametrization: mean = shape/rate.
  double gamma(double shape, double rate);

  double beta(double a, double b);

  int bernoulli(double p);

  // Single draw from {0,..,K-1} with (possibly unnormalized) nonnegative weights.
  int categorical(const Eigen::VectorXd& weights);

  // n independent categorical draws accumulated into counts.
  Eigen::VectorXi multinomial(int n, const Eigen::VectorXd& probs);

  Eigen::VectorXd dirichlet(const Eigen::VectorXd& concentration);

  // mean + L z with L the lower Cholesky factor of the covariance.
  Eigen::VectorXd mvnormal_chol(const Eigen::VectorXd& mean, const Eigen::MatrixXd& chol_lower);
  Eigen::VectorXd mvnormal(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov);

  // W(df, inv_scale^{-1}) via Bartlett decomposition; expectation df * inv_scale^{-1}.
  // df must be >= dimension. The inverse-scale parametrization matches the
  // sampler's conjugate update, whose draws have expectation (nu+L)(nu Psi + ...)^{-1}.
  Eigen::MatrixXd wishart(double df, const Eigen::MatrixXd& inv_scale);

  double skew_normal(const SkewNormalParams& p);
  double skew_normal(double mean, double variance, double lambda) {
    return skew_normal(skew_normal_from_moments(mean, variance, lambda));
  }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  std::mt19937_64 eng_;
};

}  // namespace aroc::rng
