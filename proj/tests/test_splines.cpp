#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "aroc/common.hpp"
#include "aroc/rng.hpp"
#include "aroc/splines.hpp"

using namespace aroc::splines;

namespace {

// Independent oracle: textbook Cox-de Boor recursion, 0/0 := 0 convention,
// half-open first-order indicators. Valid for x strictly inside (low, high).
double coxdeboor(const std::vector<double>& t, int i, int order, double x) {
  if (order == 1) return (t[i] <= x && x < t[i + 1]) ? 1.0 : 0.0;
  double a = 0.0, b = 0.0;
  const double da = t[i + order - 1] - t[i];
  const double db = t[i + order] - t[i + 1];
  if (da > 0.0) a = (x - t[i]) / da * coxdeboor(t, i, order - 1, x);
  if (db > 0.0) b = (t[i + order] - x) / db * coxdeboor(t, i + 1, order - 1, x);
  return a + b;
}

std::vector<double> oracle_basis(const KnotSet& ks, double x) {
  std::vector<double> t;
  for (int i = 0; i < kOrder; ++i) t.push_back(ks.low);
  t.insert(t.end(), ks.interior.begin(), ks.interior.end());
  for (int i = 0; i < kOrder; ++i) t.push_back(ks.high);
  std::vector<double> out(ks.dim());
  for (int i = 0; i < ks.dim(); ++i) out[i] = coxdeboor(t, i, kOrder, x);
  return out;
}

const std::vector<double>& column_of(const std::map<std::string, std::vector<double>>& cols,
                                     const std::string& name) {
  return cols.at(name);
}

}  // namespace

TEST_CASE("knot_sequence places interior knots at evenly spaced quantiles") {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);  // 1..100

  const KnotSet ks = knot_sequence(v, 4);
  CHECK(ks.low == 1.0);
  CHECK(ks.high == 100.0);
  REQUIRE(ks.interior.size() == 4);
  CHECK(ks.interior[0] == doctest::Approx(20.8).epsilon(1e-12));
  CHECK(ks.interior[1] == doctest::Approx(40.6).epsilon(1e-12));
  CHECK(ks.interior[2] == doctest::Approx(60.4).epsilon(1e-12));
  CHECK(ks.interior[3] == doctest::Approx(80.2).epsilon(1e-12));

  CHECK(knot_sequence(v, 0).interior.empty());
  CHECK(knot_sequence(v, 0).dim() == 3);
  CHECK(ks.dim() == 7);

  CHECK_THROWS_AS(knot_sequence({2.0, 2.0, 2.0}, 0), aroc::DataError);
  CHECK_THROWS_AS(knot_sequence({1.0}, 0), aroc::DataError);
  CHECK_THROWS_AS(knot_sequence(v, -1), std::invalid_argument);
  // heavy ties collapse adjacent quantile knots
  std::vector<double> tied{0.0, 5.0, 5.0, 5.0, 5.0, 5.0, 5.0, 5.0, 5.0, 9.0};
  CHECK_THROWS_AS(knot_sequence(tied, 4), aroc::DataError);
}

TEST_CASE("bspline_basis: boundary values, nonnegativity, partition of unity") {
  std::vector<double> v(50);
  std::iota(v.begin(), v.end(), 0.0);

  // no interior knots: 3 functions, (1,0,0) at the left boundary
  {
    const KnotSet ks = knot_sequence(v, 0);
    const Eigen::VectorXd at_low = bspline_basis(ks, ks.low);
    REQUIRE(at_low.size() == 3);
    CHECK(at_low[0] == 1.0);
    CHECK(at_low[1] == 0.0);
    CHECK(at_low[2] == 0.0);
    const Eigen::VectorXd at_high = bspline_basis(ks, ks.high);
    CHECK(at_high[2] == 1.0);
    CHECK(at_high[0] == 0.0);
  }

  aroc::rng::RngStream r(99, 0);
  for (int K : {0, 1, 4, 7}) {
    const KnotSet ks = knot_sequence(v, K);
    for (int rep = 0; rep < 250; ++rep) {
      const double x = ks.low + (ks.high - ks.low) * r.uniform01();
      const Eigen::VectorXd b = bspline_basis(ks, x);
      REQUIRE(b.size() == K + 3);
      CHECK(b.minCoeff() >= 0.0);
      CHECK(std::fabs(b.sum() - 1.0) <= 1e-12);

      // local support: nonzero entries form a window of at most kOrder columns
      int first = -1, last = -1;
      for (int i = 0; i < b.size(); ++i)
        if (b[i] != 0.0) {
          if (first < 0) first = i;
          last = i;
        }
      CHECK(last - first + 1 <= kOrder);
    }
  }
}

TEST_CASE("bspline_basis matches the recursive oracle") {
  std::vector<double> v;
  aroc::rng::RngStream r(7, 1);
  for (int i = 0; i < 80; ++i) v.push_back(r.normal(2.0, 3.0));

  for (int K : {0, 2, 4}) {
    const KnotSet ks = knot_sequence(v, K);
    for (int rep = 0; rep < 100; ++rep) {
      // strictly interior points; the oracle's half-open indicators are
      // ill-defined exactly at the right boundary
      const double x = ks.low + (ks.high - ks.low) * (0.001 + 0.998 * r.uniform01());
      const Eigen::VectorXd b = bspline_basis(ks, x);
      const std::vector<double> expect = oracle_basis(ks, x);
      for (int i = 0; i < b.size(); ++i) CHECK(std::fabs(b[i] - expect[i]) <= 1e-12);
    }
  }
}

TEST_CASE("bspline_basis clamps out-of-range inputs") {
  std::vector<double> v{0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
  const KnotSet ks = knot_sequence(v, 1);
  CHECK(bspline_basis(ks, -3.0) == bspline_basis(ks, ks.low));
  CHECK(bspline_basis(ks, 99.0) == bspline_basis(ks, ks.high));
  CHECK_THROWS_AS(bspline_basis(ks, std::nan("")), aroc::DataError);
}

TEST_CASE("design rows: dimensions and block layout") {
  std::map<std::string, std::vector<double>> cols;
  aroc::rng::RngStream r(5, 0);
  for (int i = 0; i < 40; ++i) {
    cols["age"].push_back(r.normal(50.0, 8.0));
    cols["marker"].push_back(r.normal(0.0, 1.0));
    cols["gender"].push_back(static_cast<double>(r.bernoulli(0.5)));
  }
  auto col = [&](const std::string& n) -> const std::vector<double>& {
    return column_of(cols, n);
  };

  SUBCASE("linear plus smooth") {
    ModelSpec spec;
    spec.terms = {LinearTerm{"marker"}, SmoothTerm{"age", 4}};
    const ModelDesign d = build_design(spec, col);
    CHECK(d.q == 1 + 1 + 7);

    auto value = [&](const std::string& n) { return n == "marker" ? -1.25 : 47.0; };
    const Eigen::VectorXd z = d.row(value);
    CHECK(z[0] == 1.0);
    CHECK(z[1] == -1.25);
    const Eigen::VectorXd b = bspline_basis(*d.terms[1].knots, 47.0);
    for (int i = 0; i < 7; ++i) CHECK(z[2 + i] == b[i]);
    CHECK(std::fabs(z.segment(2, 7).sum() - 1.0) <= 1e-12);
  }

  SUBCASE("factor-by-curve: per-level blocks plus the factor main effect") {
    ModelSpec spec;
    spec.terms = {FactorSmoothTerm{"age", "gender", 0}};
    const ModelDesign d = build_design(spec, col);
    CHECK(d.q == 1 + (2 * 3 + 1));  // the interaction block spans 7 columns

    const KnotSet& ks = *d.terms[0].knots;
    const Eigen::VectorXd b = bspline_basis(ks, 52.0);

    auto level0 = [&](const std::string& n) { return n == "age" ? 52.0 : 0.0; };
    Eigen::VectorXd z0 = d.row(level0);
    CHECK(z0[0] == 1.0);
    for (int i = 0; i < 3; ++i) {
      CHECK(z0[1 + i] == b[i]);  // active level-0 block
      CHECK(z0[4 + i] == 0.0);   // silent level-1 block
    }
    CHECK(z0[7] == 0.0);  // main-effect column

    auto level1 = [&](const std::string& n) { return n == "age" ? 52.0 : 1.0; };
    Eigen::VectorXd z1 = d.row(level1);
    for (int i = 0; i < 3; ++i) {
      CHECK(z1[1 + i] == 0.0);
      CHECK(z1[4 + i] == b[i]);
    }
    CHECK(z1[7] == 1.0);

    auto bad = [&](const std::string& n) { return n == "age" ? 52.0 : 0.5; };
    CHECK_THROWS_AS(d.row(bad), aroc::DataError);
  }

  SUBCASE("factor columns validated at build time") {
    cols["gender"][3] = 0.5;
    ModelSpec spec;
    spec.terms = {FactorTerm{"gender"}};
    CHECK_THROWS_AS(build_design(spec, col), aroc::DataError);
  }

  SUBCASE("term labels for metadata") {
    CHECK(term_label(SmoothTerm{"age", 4}) == "s(age, K=4)");
    CHECK(term_label(FactorSmoothTerm{"age", "gender", 0}) == "s(age, K=0, by=gender)");
    CHECK(term_label(LinearTerm{"marker"}) == "marker");
    CHECK(term_label(FactorTerm{"gender"}) == "factor(gender)");
  }
}
