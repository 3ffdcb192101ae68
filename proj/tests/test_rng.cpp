#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "aroc/common.hpp"
#include "aroc/rng.hpp"
#include "aroc/stats.hpp"

using aroc::rng::RngStream;
using aroc::rng::std_normal_cdf;
using aroc::rng::std_normal_quantile;

namespace {

// Independent oracle: Maclaurin series for erf, long-double accumulation.
// Converges to ~1e-17 for |x| <= 4, which covers every comparison below.
double erf_series(double x) {
  const long double z = x;
  long double term = z;  // n = 0 term: x
  long double sum = z;
  for (int n = 1; n < 200; ++n) {
    term *= -z * z / static_cast<long double>(n);
    const long double contrib = term / static_cast<long double>(2 * n + 1);
    sum += contrib;
    if (std::fabs(static_cast<double>(contrib)) < 1e-19) break;
  }
  return static_cast<double>(sum * 2.0L / std::sqrt(M_PIl));
}

double cdf_oracle(double x) { return 0.5 * (1.0 + erf_series(x / std::sqrt(2.0))); }

// Independent oracle: bisect the cdf.
double quantile_oracle(double p) {
  double lo = -40.0, hi = 40.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (std_normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double corr(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = aroc::stats::mean(a), mb = aroc::stats::mean(b);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// One-sample Kolmogorov-Smirnov statistic against the standard normal.
double ks_vs_normal(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = std_normal_cdf(x[i]);
    d = std::max(d, std::fabs((static_cast<double>(i) + 1.0) / n - f));
    d = std::max(d, std::fabs(static_cast<double>(i) / n - f));
  }
  return d;
}

}  // namespace

TEST_CASE("standard normal cdf") {
  CHECK(std_normal_cdf(0.0) == 0.5);
  CHECK(std_normal_cdf(1.959964) == doctest::Approx(0.975).epsilon(1e-6));

  // against the series oracle across the body of the distribution
  for (int i = 0; i <= 120; ++i) {
    const double x = -3.0 + 6.0 * i / 120.0;
    CHECK(std::fabs(std_normal_cdf(x) - cdf_oracle(x)) <= 1e-12);
  }

  for (double x : {0.1, 1.0, 3.0})
    CHECK(std::fabs(std_normal_cdf(x) + std_normal_cdf(-x) - 1.0) <= 1e-12);

  double prev = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double x = -8.0 + 16.0 * i / 200.0;
    const double f = std_normal_cdf(x);
    CHECK(f >= prev);
    prev = f;
  }

  CHECK_THROWS_AS(std_normal_cdf(std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(std_normal_cdf(INFINITY), std::invalid_argument);
}

TEST_CASE("standard normal quantile") {
  CHECK(std_normal_quantile(0.5) == 0.0);
  CHECK(std_normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
  CHECK(std::fabs(std_normal_quantile(0.975) - quantile_oracle(0.975)) <= 1e-9);

  // quantile(cdf(x)) roundtrip on a 1000-point grid. |x| <= 5.5 keeps the
  // upper-tail p representable: beyond that, ulp(1)/pdf alone exceeds 1e-9.
  for (int i = 0; i < 1000; ++i) {
    const double x = -5.5 + 11.0 * (i + 0.5) / 1000.0;
    CHECK(std::fabs(std_normal_quantile(std_normal_cdf(x)) - x) <= 1e-9);
  }
  // the lower tail stays well conditioned much deeper
  for (int i = 0; i < 100; ++i) {
    const double x = -8.0 + 2.5 * i / 100.0;
    CHECK(std::fabs(std_normal_quantile(std_normal_cdf(x)) - x) <= 1e-9);
  }

  // spot checks against the bisection oracle, including tails
  for (double p : {1e-10, 1e-6, 0.01, 0.3, 0.7, 0.99, 1.0 - 1e-6}) {
    CHECK(std::fabs(std_normal_quantile(p) - quantile_oracle(p)) <= 1e-9);
  }

  CHECK_THROWS_AS(std_normal_quantile(0.0), std::invalid_argument);
  CHECK_THROWS_AS(std_normal_quantile(1.0), std::invalid_argument);
  CHECK_THROWS_AS(std_normal_quantile(-0.2), std::invalid_argument);
}

TEST_CASE("stream determinism and independence") {
  RngStream a(42, 7), b(42, 7), c(42, 8);
  bool same = true, differ = false;
  for (int i = 0; i < 100; ++i) {
    const double ua = a.uniform01();
    same = same && (ua == b.uniform01());
    differ = differ || (ua != c.uniform01());
  }
  CHECK(same);
  CHECK(differ);

  RngStream p(3, 5);
  CHECK(p.child(2).stream() == RngStream(3, 5).child(2).stream());
  CHECK(p.child(2).uniform01() == RngStream(3, 5).child(2).uniform01());
  CHECK(p.child(2).stream() != p.child(3).stream());

  // distinct streams look uncorrelated
  const int n = 100000;
  RngStream s1(9, 1), s2(9, 2);
  std::vector<double> u1(n), u2(n);
  for (int i = 0; i < n; ++i) {
    u1[i] = s1.uniform01();
    u2[i] = s2.uniform01();
  }
  CHECK(std::fabs(corr(u1, u2)) < 4.0 / std::sqrt(static_cast<double>(n)));

  for (double u : {u1[0], u1[n - 1]}) CHECK((u > 0.0 && u < 1.0));
  CHECK(aroc::stats::mean(u1) == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("scalar samplers match their moments") {
  RngStream r(2024, 0);
  const int n = 200000;
  const double root_n = std::sqrt(static_cast<double>(n));

  std::vector<double> z(n);
  for (auto& v : z) v = r.normal(1.5, 2.0);
  CHECK(std::fabs(aroc::stats::mean(z) - 1.5) < 4.0 * 2.0 / root_n);
  CHECK(aroc::stats::sd(z) == doctest::Approx(2.0).epsilon(0.02));

  // gamma(3, 2): mean 1.5, var 0.75
  for (auto& v : z) v = r.gamma(3.0, 2.0);
  CHECK(std::fabs(aroc::stats::mean(z) - 1.5) < 4.0 * std::sqrt(0.75) / root_n);
  CHECK(aroc::stats::variance(z) == doctest::Approx(0.75).epsilon(0.05));

  // the shape<1 branch: gamma(0.5, 1): mean 0.5, var 0.5
  for (auto& v : z) v = r.gamma(0.5, 1.0);
  CHECK(std::fabs(aroc::stats::mean(z) - 0.5) < 4.0 * std::sqrt(0.5) / root_n);
  CHECK(aroc::stats::variance(z) == doctest::Approx(0.5).epsilon(0.07));

  // beta(2, 5): mean 2/7, var 10/392
  for (auto& v : z) v = r.beta(2.0, 5.0);
  CHECK(std::fabs(aroc::stats::mean(z) - 2.0 / 7.0) < 4.0 * std::sqrt(10.0 / 392.0) / root_n);
  CHECK(aroc::stats::variance(z) == doctest::Approx(10.0 / 392.0).epsilon(0.05));

  int ones = 0;
  for (int i = 0; i < n; ++i) ones += r.bernoulli(0.3);
  CHECK(std::fabs(ones / static_cast<double>(n) - 0.3) <
        4.0 * std::sqrt(0.3 * 0.7) / root_n);

  CHECK_THROWS_AS(r.gamma(-1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(r.bernoulli(1.5), std::invalid_argument);
}

TEST_CASE("categorical and multinomial") {
  RngStream r(11, 0);
  Eigen::VectorXd w(3);
  w << 1.0, 2.0, 3.0;  // deliberately unnormalized
  const int n = 120000;
  Eigen::VectorXd freq = Eigen::VectorXd::Zero(3);
  for (int i = 0; i < n; ++i) freq[r.categorical(w)] += 1.0;
  freq /= static_cast<double>(n);
  for (int k = 0; k < 3; ++k) {
    const double p = w[k] / 6.0;
    CHECK(std::fabs(freq[k] - p) < 4.0 * std::sqrt(p * (1 - p) / n));
  }

  Eigen::VectorXd probs = w / w.sum();
  Eigen::VectorXi counts = r.multinomial(500, probs);
  CHECK(counts.sum() == 500);
  CHECK(counts.minCoeff() >= 0);

  Eigen::VectorXd neg(2);
  neg << 0.5, -0.1;
  CHECK_THROWS_AS(r.categorical(neg), std::invalid_argument);
}

TEST_CASE("dirichlet weights") {
  RngStream r(5, 1);

  Eigen::VectorXd single(1);
  single << 2.5;
  CHECK(r.dirichlet(single)[0] == 1.0);  // length-1 concentration is degenerate

  const int k = 5, n = 100000;
  Eigen::VectorXd conc = Eigen::VectorXd::Ones(k);
  Eigen::VectorXd mean_acc = Eigen::VectorXd::Zero(k);
  double worst_sum_err = 0.0;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd d = r.dirichlet(conc);
    worst_sum_err = std::max(worst_sum_err, std::fabs(d.sum() - 1.0));
    mean_acc += d;
  }
  mean_acc /= static_cast<double>(n);
  CHECK(worst_sum_err <= 1e-12);
  // flat Dirichlet coordinate ~ Beta(1, k-1): var = (1/k)(1-1/k)/(k+1)
  const double mcse = std::sqrt((1.0 / k) * (1.0 - 1.0 / k) / (k + 1) / n);
  for (int j = 0; j < k; ++j) CHECK(std::fabs(mean_acc[j] - 1.0 / k) < 3.0 * mcse);

  Eigen::VectorXd bad(2);
  bad << 1.0, 0.0;
  CHECK_THROWS_AS(r.dirichlet(bad), std::invalid_argument);
}

TEST_CASE("multivariate normal") {
  RngStream r(7, 3);
  Eigen::VectorXd mu(2);
  mu << 1.0, -2.0;
  Eigen::MatrixXd cov(2, 2);
  cov << 2.0, 0.6, 0.6, 1.0;

  const int n = 100000;
  Eigen::VectorXd m = Eigen::VectorXd::Zero(2);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2, 2);
  std::vector<Eigen::VectorXd> draws(n);
  for (int i = 0; i < n; ++i) {
    draws[i] = r.mvnormal(mu, cov);
    m += draws[i];
  }
  m /= static_cast<double>(n);
  for (int i = 0; i < n; ++i) s += (draws[i] - m) * (draws[i] - m).transpose();
  s /= static_cast<double>(n - 1);

  for (int j = 0; j < 2; ++j)
    CHECK(std::fabs(m[j] - mu[j]) < 4.0 * std::sqrt(cov(j, j) / n));
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) CHECK(s(a, b) == doctest::Approx(cov(a, b)).epsilon(0.05));

  Eigen::MatrixXd not_pd(2, 2);
  not_pd << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(r.mvnormal(mu, not_pd), aroc::NumericalError);
}

TEST_CASE("wishart sampler") {
  RngStream r(13, 0);

  // 1x1 case reduces to a gamma-type draw: W(5, 1/2) has mean 2.5, var 2*5*0.5^2 = 2.5
  {
    Eigen::MatrixXd inv_scale(1, 1);
    inv_scale << 2.0;
    const int n = 20000;
    std::vector<double> d(n);
    for (auto& v : d) v = r.wishart(5.0, inv_scale)(0, 0);
    CHECK(std::fabs(aroc::stats::mean(d) - 2.5) <
          4.0 * std::sqrt(2.5 / static_cast<double>(n)));
    CHECK(aroc::stats::variance(d) == doctest::Approx(2.5).epsilon(0.1));
  }

  // conjugate-update shape: df nu, inverse scale nu*Psi with Psi = I -> mean Psi^{-1} = I
  {
    const int q = 4, n = 10000;
    const double nu = 6.0;
    Eigen::MatrixXd inv_scale = nu * Eigen::MatrixXd::Identity(q, q);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(q, q);
    for (int i = 0; i < n; ++i) {
      Eigen::MatrixXd w = r.wishart(nu, inv_scale);
      if (i < 50) {
        Eigen::LLT<Eigen::MatrixXd> llt(w);
        CHECK(llt.info() == Eigen::Success);  // every draw positive definite
      }
      acc += w;
    }
    acc /= static_cast<double>(n);
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b) {
        if (a == b)
          CHECK(acc(a, b) == doctest::Approx(1.0).epsilon(0.05));
        else
          CHECK(std::fabs(acc(a, b)) < 0.05);
      }
  }

  Eigen::MatrixXd id2 = Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(r.wishart(1.0, id2), std::invalid_argument);
}

TEST_CASE("skew normal sampler and moment parametrization") {
  using aroc::rng::skew_normal_from_moments;

  // moment conversion is an exact algebraic roundtrip
  for (double lam : {-3.0, 0.0, 1.0, 2.0}) {
    const auto p = skew_normal_from_moments(1.3, 7.5, lam);
    const double delta = lam / std::sqrt(1.0 + lam * lam);
    const double mean_back = p.xi + p.omega * delta * std::sqrt(2.0 / M_PI);
    const double var_back = p.omega * p.omega * (1.0 - 2.0 * delta * delta / M_PI);
    CHECK(mean_back == doctest::Approx(1.3).epsilon(1e-12));
    CHECK(var_back == doctest::Approx(7.5).epsilon(1e-12));
  }

  RngStream r(31, 4);

  // shape 0 degenerates to the normal law
  {
    std::vector<double> z(100000);
    for (auto& v : z) v = r.skew_normal(0.0, 1.0, 0.0);
    CHECK(ks_vs_normal(z) * std::sqrt(static_cast<double>(z.size())) < 1.95);
  }

  // the covariate law used by the simulation scenarios
  {
    const int n = 1000000;
    std::vector<double> z(n);
    for (auto& v : z) v = r.skew_normal(0.0, 25.0, 2.0);
    CHECK(std::fabs(aroc::stats::mean(z)) < 4.0 * 5.0 / std::sqrt(static_cast<double>(n)));
    CHECK(aroc::stats::variance(z) == doctest::Approx(25.0).epsilon(0.02));
    CHECK(aroc::stats::skewness(z) > 0.2);

    for (auto& v : z) v = r.skew_normal(3.0, 16.0, 1.0);
    CHECK(aroc::stats::mean(z) == doctest::Approx(3.0).epsilon(0.01));
    CHECK(aroc::stats::variance(z) == doctest::Approx(16.0).epsilon(0.02));
  }
}
