#pragma once

// Small numeric helpers shared across modules. Reductions that feed reported
// scalars sort their summands first so results are exactly invariant under
// permutations of the inputs (fp addition is commutative but not associative).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace aroc::stats {

inline double sum_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

inline double mean(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("mean: empty input");
  return sum_sorted(v) / static_cast<double>(v.size());
}

// Sample variance, n-1 divisor.
inline double variance(const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n < 2) throw std::invalid_argument("variance: need at least 2 values");
  const double mu = mean(v);
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = (v[i] - mu) * (v[i] - mu);
  return sum_sorted(std::move(sq)) / static_cast<double>(n - 1);
}

inline double sd(const std::vector<double>& v) { return std::sqrt(variance(v)); }

// log(sum_i exp(v_i)) with max shift; summands sorted for permutation-exact results.
inline double logsumexp(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("logsumexp: empty input");
  std::sort(v.begin(), v.end());
  const double vmax = v.back();
  if (!std::isfinite(vmax)) return vmax;  // all -inf, or a +inf/NaN dominates
  double s = 0.0;
  for (double x : v) s += std::exp(x - vmax);
  return vmax + std::log(s);
}

// Quantile of a sample, linear interpolation between order statistics
// (the convention used for knot placement and percentile bands throughout).
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile: empty input");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile: p outside [0,1]");
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = p * static_cast<double>(n - 1);
  const std::size_t i = static_cast<std::size_t>(h);
  if (i + 1 >= n) return sorted[n - 1];
  const double frac = h - static_cast<double>(i);
  return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

inline double quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  return quantile_sorted(v, p);
}

// Moment skewness m3 / m2^(3/2) with population (1/n) moments.
inline double skewness(const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n < 2) throw std::invalid_argument("skewness: need at least 2 values");
  const double mu = mean(v);
  double m2 = 0.0, m3 = 0.0;
  for (double x : v) {
    const double d = x - mu;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= static_cast<double>(n);
  m3 /= static_cast<double>(n);
  if (m2 <= 0.0) throw std::invalid_argument("skewness: zero variance");
  return m3 / std::pow(m2, 1.5);
}

// Raw kurtosis m4 / m2^2 (normal reference value 3).
inline double kurtosis(const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n < 2) throw std::invalid_argument("kurtosis: need at least 2 values");
  const double mu = mean(v);
  double m2 = 0.0, m4 = 0.0;
  for (double x : v) {
    const double d = x - mu;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= static_cast<double>(n);
  m4 /= static_cast<double>(n);
  if (m2 <= 0.0) throw std::invalid_argument("kurtosis: zero variance");
  return m4 / (m2 * m2);
}

inline Eigen::VectorXd linspace(double a, double b, int n) {
  if (n < 2) throw std::invalid_argument("linspace: need at least 2 points");
  Eigen::VectorXd g(n);
  for (int i = 0; i < n; ++i)
    g[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

inline std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace aroc::stats
