#include "aroc/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "aroc/common.hpp"

namespace aroc::rng {

namespace {

constexpr double kSqrt1_2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  // boost-style combine pushed through one splitmix round
  std::uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  return splitmix64(s);
}

}  // namespace

// ===== special functions =====

double std_normal_cdf(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("std_normal_cdf: non-finite input");
  return 0.5 * std::erfc(-x * kSqrt1_2);
}

// Wichura's PPND16 rational approximation (relative error ~1e-16), then one
// Newton polish through std_normal_cdf where the density is representable.
// The upper half reflects through symmetry so the polish always happens in the
// lower tail, where Phi(x) - p is free of cancellation.
double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("std_normal_quantile: p must lie strictly in (0,1)");
  if (p > 0.5) return -std_normal_quantile(1.0 - p);

  const double q = p - 0.5;
  double x;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    x = q *
        (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
              6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
            1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
          1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
        (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
              3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
            5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
          4.2313330701600911252e1) * r + 1.0);
  } else {
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    if (r <= 5.0) {
      r -= 1.6;
      x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
              3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
            4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
            2.05319162663775882187e0) * r + 1.0);
    } else {
      r -= 5.0;
      x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
            5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
    }
    if (q < 0.0) x = -x;
  }

  const double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
  if (pdf > 1e-280) x -= (std_normal_cdf(x) - p) / pdf;
  return x;
}

SkewNormalParams skew_normal_from_moments(double mean, double variance, double lambda) {
  if (!(variance > 0.0) || !std::isfinite(mean) || !std::isfinite(lambda))
    throw std::invalid_argument("skew_normal_from_moments: bad arguments");
  const double delta = lambda / std::sqrt(1.0 + lambda * lambda);
  const double denom = 1.0 - 2.0 * delta * delta / M_PI;
  SkewNormalParams out;
  out.omega = std::sqrt(variance / denom);
  out.xi = mean - out.omega * delta * std::sqrt(2.0 / M_PI);
  out.lambda = lambda;
  return out;
}

// ===== stream =====

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
  std::uint64_t s = hash_combine(seed, stream);
  std::uint32_t words[8];
  for (auto& w : words) w = static_cast<std::uint32_t>(splitmix64(s) >> 32);
  std::seed_seq seq(words, words + 8);
  eng_.seed(seq);
}

RngStream RngStream::child(std::uint64_t k) const {
  return RngStream(seed_, hash_combine(stream_, k + 1));
}

double RngStream::uniform01() {
  // 53 bits, offset by half an ulp so 0 and 1 are unreachable
  return (static_cast<double>(eng_() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

double RngStream::normal(double mean, double sd) {
  return mean + sd * std_normal_quantile(uniform01());
}

double RngStream::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("gamma: shape and rate must be positive");
  // Marsaglia & Tsang squeeze; boost trick for shape < 1
  double boost = 1.0;
  double a = shape;
  if (a < 1.0) {
    boost = std::pow(uniform01(), 1.0 / a);
    a += 1.0;
  }
  const double d = a - 1.0 / 3.0;
  const double c = 1.0 / (3.0 * std::sqrt(d));
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return boost * d * v / rate;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return boost * d * v / rate;
  }
}

double RngStream::beta(double a, double b) {
  const double ga = gamma(a, 1.0);
  const double gb = gamma(b, 1.0);
  return ga / (ga + gb);
}

int RngStream::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bernoulli: p outside [0,1]");
  return uniform01() < p ? 1 : 0;
}

int RngStream::categorical(const Eigen::VectorXd& weights) {
  const int k = static_cast<int>(weights.size());
  if (k == 0) throw std::invalid_argument("categorical: empty weights");
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    if (!(weights[i] >= 0.0)) throw std::invalid_argument("categorical: negative weight");
    total += weights[i];
  }
  if (!(total > 0.0)) throw NumericalError("categorical: all weights zero");
  const double u = uniform01() * total;
  double acc = 0.0;
  for (int i = 0; i < k; ++i) {
    acc += weights[i];
    if (u <= acc) return i;
  }
  return k - 1;  // fp guard
}

Eigen::VectorXi RngStream::multinomial(int n, const Eigen::VectorXd& probs) {
  if (n < 0) throw std::invalid_argument("multinomial: negative count");
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(probs.size());
  for (int i = 0; i < n; ++i) counts[categorical(probs)] += 1;
  return counts;
}

Eigen::VectorXd RngStream::dirichlet(const Eigen::VectorXd& concentration) {
  const int k = static_cast<int>(concentration.size());
  if (k == 0) throw std::invalid_argument("dirichlet: empty concentration");
  Eigen::VectorXd g(k);
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    if (!(concentration[i] > 0.0))
      throw std::invalid_argument("dirichlet: concentrations must be positive");
    g[i] = gamma(concentration[i], 1.0);
    total += g[i];
  }
  if (!(total > 0.0)) throw NumericalError("dirichlet: underflow in gamma draws");
  return g / total;
}

Eigen::VectorXd RngStream::mvnormal_chol(const Eigen::VectorXd& mean,
                                         const Eigen::MatrixXd& chol_lower) {
  const int q = static_cast<int>(mean.size());
  Eigen::VectorXd z(q);
  for (int i = 0; i < q; ++i) z[i] = normal();
  return mean + chol_lower * z;
}

Eigen::VectorXd RngStream::mvnormal(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw NumericalError("mvnormal: covariance not positive definite");
  return mvnormal_chol(mean, llt.matrixL());
}

Eigen::MatrixXd RngStream::wishart(double df, const Eigen::MatrixXd& inv_scale) {
  const int q = static_cast<int>(inv_scale.rows());
  if (inv_scale.cols() != q) throw std::invalid_argument("wishart: inverse scale not square");
  if (!(df >= static_cast<double>(q)))
    throw std::invalid_argument("wishart: df must be >= dimension");
  Eigen::LLT<Eigen::MatrixXd> llt(inv_scale);
  if (llt.info() != Eigen::Success)
    throw NumericalError("wishart: inverse scale not positive definite");
  // scale = inv_scale^{-1} = F F' with F = L^{-T}
  Eigen::MatrixXd f = Eigen::MatrixXd(llt.matrixL())
                          .transpose()
                          .triangularView<Eigen::Upper>()
                          .solve(Eigen::MatrixXd::Identity(q, q));
  // Bartlett factor: chi on the diagonal, standard normals below
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(q, q);
  for (int i = 0; i < q; ++i) {
    a(i, i) = std::sqrt(2.0 * gamma(0.5 * (df - static_cast<double>(i)), 1.0));
    for (int j = 0; j < i; ++j) a(i, j) = normal();
  }
  Eigen::MatrixXd fa = f * a;
  return fa * fa.transpose();
}

double RngStream::skew_normal(const SkewNormalParams& p) {
  if (!(p.omega > 0.0)) throw std::invalid_argument("skew_normal: omega must be positive");
  const double delta = p.lambda / std::sqrt(1.0 + p.lambda * p.lambda);
  const double u0 = normal();
  const double u1 = normal();
  const double z = delta * std::fabs(u0) + std::sqrt(1.0 - delta * delta) * u1;
  return p.xi + p.omega * z;
}

}  // namespace aroc::rng
