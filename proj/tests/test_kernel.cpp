#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "aroc/common.hpp"
#include "aroc/kernel.hpp"
#include "aroc/rng.hpp"
#include "aroc/stats.hpp"

using namespace aroc;

namespace {

// sin regression data with small noise
void sine_data(int n, std::vector<double>& x, std::vector<double>& y, std::uint64_t seed) {
  rng::RngStream r(seed);
  x.resize(n);
  y.resize(n);
  for (int i = 0; i < n; ++i) {
    x[i] = 6.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    y[i] = std::sin(x[i]) + 0.1 * r.normal();
  }
}

}  // namespace

TEST_CASE("nw estimate matches a hand-computed three-point case") {
  const std::vector<double> x{0.0, 1.0, 2.0};
  const std::vector<double> y{1.0, 2.0, 4.0};
  const double w0 = std::exp(-0.5 * 0.25);
  const double w1 = std::exp(-0.5 * 0.25);
  const double w2 = std::exp(-0.5 * 2.25);
  const double expected = (w0 * 1.0 + w1 * 2.0 + w2 * 4.0) / (w0 + w1 + w2);
  CHECK(std::abs(kernel::nw_eval(x, y, 1.0, 0.5) - expected) < 1e-12);

  // vectorized wrapper agrees entry by entry
  const std::vector<double> ev{0.5, 1.5};
  Eigen::VectorXd m = kernel::nw_regress(x, y, 1.0, ev);
  CHECK(m[0] == kernel::nw_eval(x, y, 1.0, 0.5));
  CHECK(m[1] == kernel::nw_eval(x, y, 1.0, 1.5));
}

TEST_CASE("huge bandwidth recovers the sample mean, constant response passes through") {
  rng::RngStream r(41);
  std::vector<double> x(50), y(50);
  for (int i = 0; i < 50; ++i) {
    x[i] = r.uniform01() * 10.0;
    y[i] = r.normal(2.0, 1.5);
  }
  const double range = *std::max_element(x.begin(), x.end()) -
                       *std::min_element(x.begin(), x.end());
  const double ybar = stats::mean(y);
  for (double x0 : {0.0, 3.7, 10.0})
    CHECK(std::abs(kernel::nw_eval(x, y, 1e6 * range, x0) - ybar) < 1e-9);

  std::vector<double> yc(50, 3.25);
  for (double h : {0.05, 0.5, 5.0})
    CHECK(std::abs(kernel::nw_eval(x, yc, h, 4.2) - 3.25) < 1e-12);
}

TEST_CASE("total kernel underflow falls back to the nearest neighbor and is flagged") {
  const std::vector<double> x{0.0, 1.0, 2.0};
  const std::vector<double> y{1.0, 2.0, 4.0};
  int flags = 0;
  const double v = kernel::nw_eval(x, y, 1e-3, 50.0, &flags);
  CHECK(v == 4.0);
  CHECK(flags == 1);
  // well-supported evaluation does not touch the flag
  kernel::nw_eval(x, y, 1.0, 1.0, &flags);
  CHECK(flags == 1);
}

TEST_CASE("bandwidth grid brackets the reference rule") {
  std::vector<double> x(200);
  rng::RngStream r(7);
  for (auto& v : x) v = r.normal(0.0, 2.0);
  const auto grid = kernel::bandwidth_grid(x);
  REQUIRE(grid.size() == 40);
  const double h_ref = 1.06 * stats::sd(x) * std::pow(200.0, -0.2);
  CHECK(grid.front() == doctest::Approx(h_ref / 20.0).epsilon(1e-12));
  CHECK(grid.back() == doctest::Approx(20.0 * h_ref).epsilon(1e-12));
  for (std::size_t k = 1; k < grid.size(); ++k) CHECK(grid[k] > grid[k - 1]);

  std::vector<double> xc(10, 1.0);
  CHECK_THROWS_AS((void)kernel::bandwidth_grid(xc), DataError);
}

TEST_CASE("cross-validated bandwidth beats coarse and fine alternatives on sine data") {
  std::vector<double> x, y;
  sine_data(200, x, y, 99);
  const auto grid = kernel::bandwidth_grid(x);
  const double h = kernel::lscv_bandwidth(x, y, grid);
  CHECK(h >= grid.front());
  CHECK(h <= grid.back());
  const double s = kernel::lscv_score(x, y, h);
  CHECK(s <= kernel::lscv_score(x, y, h / 4.0));
  CHECK(s <= kernel::lscv_score(x, y, 4.0 * h));
}

TEST_CASE("constant response gives an exact score tie broken to the grid minimum") {
  std::vector<double> x(40);
  rng::RngStream r(12);
  for (auto& v : x) v = r.uniform01() * 5.0;
  std::vector<double> y(40, 7.5);
  const auto grid = kernel::bandwidth_grid(x);
  for (double h : {grid.front(), grid[20], grid.back()})
    CHECK(kernel::lscv_score(x, y, h) == 0.0);
  CHECK(kernel::lscv_bandwidth(x, y, grid) == grid.front());
}

TEST_CASE("location-scale fit standardizes its residuals") {
  std::vector<double> x(200), y(200);
  rng::RngStream r(2024);
  for (int i = 0; i < 200; ++i) {
    x[i] = r.uniform01();
    y[i] = std::sin(2.0 * M_PI * x[i]) + 0.3 * r.normal();
  }
  const auto fit = kernel::fit_location_scale(x, y);
  CHECK(std::abs(stats::mean(fit.residuals)) < 0.1);
  CHECK(std::abs(stats::variance(fit.residuals) - 1.0) < 0.1);

  // ecdf evaluates to exact lattice values k/n and hits each order statistic
  const std::size_t n = fit.sorted_residuals.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double p = fit.residual_ecdf(fit.sorted_residuals[k]);
    const double count = std::round(p * static_cast<double>(n));
    CHECK(p == count / static_cast<double>(n));
    CHECK(p >= static_cast<double>(k + 1) / static_cast<double>(n));
  }
  CHECK(fit.residual_ecdf(-1e9) == 0.0);
  CHECK(fit.residual_ecdf(1e9) == 1.0);

  // cdf is a proper distribution in y at a fixed covariate value
  double prev = 0.0;
  for (double q = -3.0; q <= 3.0; q += 0.25) {
    const double c = fit.cdf(q, 0.5);
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("variance smoothing picks up heteroscedasticity") {
  std::vector<double> x(300), y(300);
  rng::RngStream r(555);
  for (int i = 0; i < 300; ++i) {
    x[i] = r.uniform01();
    y[i] = 2.0 * x[i] + (0.2 + x[i]) * r.normal();
  }
  const auto fit = kernel::fit_location_scale(x, y);
  CHECK(std::sqrt(fit.var_at(0.9)) > std::sqrt(fit.var_at(0.1)));
  CHECK(fit.var_at(0.5) > 0.0);
}

TEST_CASE("variance floor keeps the scale strictly positive and is counted") {
  // Nearly noiseless response with one remote spike: local squared residuals
  // underflow the floor of 1e-10 * Var(y) almost everywhere.
  std::vector<double> x(100), y(100, 0.0);
  std::iota(x.begin(), x.end(), 0.0);
  y[99] = 1000.0;
  const auto fit = kernel::fit_location_scale(x, y, 0.5, 0.5);
  const double floor = 1e-10 * stats::variance(y);
  CHECK(fit.variance_floor == doctest::Approx(floor).epsilon(1e-12));
  CHECK(fit.floor_hits >= 90);
  CHECK(fit.var_at(0.0) == fit.variance_floor);
  CHECK(fit.var_at(99.0) > fit.variance_floor);
  for (double e : fit.residuals) CHECK(std::isfinite(e));
}

TEST_CASE("constant response is rejected by the location-scale fit") {
  std::vector<double> x{0.0, 1.0, 2.0, 3.0};
  std::vector<double> y(4, 2.0);
  CHECK_THROWS_AS((void)kernel::fit_location_scale(x, y, 1.0, 1.0), DataError);
}

TEST_CASE("kernel roc recovers a binormal curve with an irrelevant covariate") {
  const int n0 = 200, n1 = 200;
  std::vector<double> x0(n0), y0(n0), x1(n1), y1(n1);
  rng::RngStream r(31);
  for (int i = 0; i < n0; ++i) {
    x0[i] = r.normal();
    y0[i] = r.normal(0.5, 0.5);
  }
  for (int j = 0; j < n1; ++j) {
    x1[j] = r.normal();
    y1[j] = r.normal(1.0, 1.0);
  }
  const Eigen::VectorXd grid = stats::linspace(0.0, 1.0, 101);
  rng::RngStream fit_rng(77);
  const auto res = kernel::kernel_aroc(x0, y0, x1, y1, grid, 50, 0.95, fit_rng);

  // truth for these marker laws
  double worst = 0.0;
  for (int k = 0; k < grid.size(); ++k) {
    const double t = grid[k];
    double truth;
    if (t <= 0.0)
      truth = 0.0;
    else if (t >= 1.0)
      truth = 1.0;
    else
      truth = rng::std_normal_cdf(0.5 + 0.5 * rng::std_normal_quantile(t));
    worst = std::max(worst, std::abs(res.curve.mean[k] - truth));
  }
  CHECK(worst < 0.17);
  CHECK(std::abs(res.aauc.mean - rng::std_normal_cdf(0.5 / std::sqrt(1.25))) < 0.1);

  // curve estimate structure
  CHECK(res.curve.mean[grid.size() - 1] == 1.0);
  for (int k = 1; k < grid.size(); ++k) CHECK(res.curve.mean[k] >= res.curve.mean[k - 1]);
  for (int k = 0; k < grid.size(); ++k) CHECK(res.curve.lower[k] <= res.curve.upper[k]);
  CHECK(res.aauc.lower <= res.aauc.upper);
  CHECK(res.aauc_draws.size() == 50);

  // same seed, same answer, byte for byte
  rng::RngStream again(77);
  const auto res2 = kernel::kernel_aroc(x0, y0, x1, y1, grid, 50, 0.95, again);
  CHECK(res2.curve.mean == res.curve.mean);
  CHECK(res2.curve.lower == res.curve.lower);
  CHECK(res2.aauc.mean == res.aauc.mean);
  CHECK(res2.h_mean == res.h_mean);
}

TEST_CASE("point estimate is bitwise invariant under observation shuffling") {
  const int n0 = 120, n1 = 90;
  std::vector<double> x0(n0), y0(n0), x1(n1), y1(n1);
  rng::RngStream r(404);
  for (int i = 0; i < n0; ++i) {
    x0[i] = r.uniform01() * 4.0;
    y0[i] = 1.0 + 0.8 * x0[i] + 0.4 * r.normal();
  }
  for (int j = 0; j < n1; ++j) {
    x1[j] = r.uniform01() * 4.0;
    y1[j] = 2.0 + 0.8 * x1[j] + 0.7 * r.normal();
  }
  const Eigen::VectorXd grid = stats::linspace(0.0, 1.0, 21);
  rng::RngStream s1(9);
  const auto base = kernel::kernel_aroc(x0, y0, x1, y1, grid, 2, 0.95, s1);

  // reverse both groups: every reported point-estimate quantity must match
  std::vector<double> rx0(x0.rbegin(), x0.rend()), ry0(y0.rbegin(), y0.rend());
  std::vector<double> rx1(x1.rbegin(), x1.rend()), ry1(y1.rbegin(), y1.rend());
  rng::RngStream s2(9);
  const auto shuf = kernel::kernel_aroc(rx0, ry0, rx1, ry1, grid, 2, 0.95, s2);
  CHECK(shuf.h_mean == base.h_mean);
  CHECK(shuf.h_var == base.h_var);
  CHECK(shuf.curve.mean == base.curve.mean);
  CHECK(std::abs(shuf.aauc.mean - base.aauc.mean) < 1e-12);
}

TEST_CASE("dataset entry point requires exactly one covariate") {
  data::Dataset d;
  rng::RngStream r(5);
  for (int i = 0; i < 40; ++i) {
    d.y.push_back(r.normal(i < 20 ? 0.0 : 1.0, 1.0));
    d.status.push_back(i < 20 ? 0 : 1);
  }
  d.covariates["x_1"] = std::vector<double>(40);
  d.covariates["x_2"] = std::vector<double>(40);
  for (int i = 0; i < 40; ++i) {
    d.covariates["x_1"][i] = r.uniform01();
    d.covariates["x_2"][i] = r.uniform01();
  }
  const Eigen::VectorXd grid = stats::linspace(0.0, 1.0, 11);
  rng::RngStream s(3);
  CHECK_THROWS_AS((void)kernel::kernel_aroc(d, grid, 2, 0.95, s), DataError);

  d.covariates.erase("x_2");
  rng::RngStream s2(3);
  const auto res = kernel::kernel_aroc(d, grid, 2, 0.95, s2);

  // equals the explicit split
  std::vector<double> x0, y0, x1, y1;
  for (int i = 0; i < 40; ++i) {
    (d.status[i] == 0 ? x0 : x1).push_back(d.covariates["x_1"][i]);
    (d.status[i] == 0 ? y0 : y1).push_back(d.y[i]);
  }
  rng::RngStream s3(3);
  const auto direct = kernel::kernel_aroc(x0, y0, x1, y1, grid, 2, 0.95, s3);
  CHECK(res.curve.mean == direct.curve.mean);
  CHECK(res.aauc.mean == direct.aauc.mean);
}

TEST_CASE("input validation") {
  std::vector<double> x{0.0, 1.0, 2.0};
  std::vector<double> y{1.0, 2.0};
  CHECK_THROWS_AS((void)kernel::nw_eval(x, y, 1.0, 0.5), DataError);
  y.push_back(3.0);
  CHECK_THROWS_AS((void)kernel::nw_eval(x, y, -1.0, 0.5), DataError);
  CHECK_THROWS_AS((void)kernel::nw_eval(x, y, 0.0, 0.5), DataError);
  y[1] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS((void)kernel::nw_eval(x, y, 1.0, 0.5), DataError);
  y[1] = 2.0;
  std::vector<double> grid;
  CHECK_THROWS_AS((void)kernel::lscv_bandwidth(x, y, grid), DataError);
  rng::RngStream s(1);
  const Eigen::VectorXd g = stats::linspace(0.0, 1.0, 5);
  CHECK_THROWS_AS((void)kernel::kernel_aroc(x, y, x, y, g, 0, 0.95, s), DataError);
}
