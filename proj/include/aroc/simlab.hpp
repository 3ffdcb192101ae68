#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "aroc/curves.hpp"
#include "aroc/dataset.hpp"
#include "aroc/rng.hpp"
#include "aroc/splines.hpp"

namespace aroc::simlab {

// Six two-group data-generating mechanisms used to benchmark the estimators,
// ranging from no covariate effect (I) through linear effects with and
// without a change in discriminatory capacity (II, III) to nonlinear trends,
// two continuous covariates, and a continuous-by-binary interaction (IV-VI).
enum class ScenarioId { I = 1, II, III, IV, V, VI };

ScenarioId parse_scenario(const std::string& text);  // "I".."VI"
std::string scenario_name(ScenarioId id);

// Group-conditional means. Every scenario is normal around these with
// sd 0.5 (nondiseased) and 1.0 (diseased). Unused covariates are ignored.
double nondiseased_mean(ScenarioId id, double x1, double x2 = 0.0, double x3 = 0.0);
double diseased_mean(ScenarioId id, double x1);

inline constexpr double kNondiseasedSd = 0.5;
inline constexpr double kDiseasedSd = 1.0;

// Covariate columns the scenario generates ("x1", optionally "x2"/"x3").
// Continuous covariates are skew normal: mean 0, variance 25, slant 2 in the
// nondiseased group; mean 3, variance 16, slant 1 in the diseased group.
// The binary x3 is Bern(0.5) in both groups.
std::vector<std::string> scenario_covariates(ScenarioId id);

// Nondiseased rows first, then diseased; the two groups are independent.
data::Dataset generate_scenario(ScenarioId id, int n_nondiseased, int n_diseased,
                                rng::RngStream& rng);

// ---- ground truth ----
//
// The true adjusted curve is E_X[Phi(a(X) + b Phi^{-1}(t))] over the diseased
// covariate law, with a(x) the standardized mean separation and b the sd
// ratio. Scenario I is analytic; the rest are evaluated by a 10^6-draw Monte
// Carlo with a fixed per-scenario oracle seed, memoized in process and cached
// on disk.
double true_aroc(ScenarioId id, double t);
Eigen::VectorXd true_aroc_grid(ScenarioId id, const Eigen::VectorXd& grid);
double true_aauc(ScenarioId id);

// Override the oracle cache directory (default: AROC_ORACLE_CACHE env var,
// else a subdirectory of the system temp dir). Empty string disables caching.
void set_oracle_cache_dir(const std::string& dir);

// Root mean squared discrepancy over a common grid.
double ermse(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth);

// ---- estimator configurations per scenario ----

// Smooth terms with `knots` interior knots for each continuous covariate;
// scenario VI uses a per-level smooth in the binary covariate.
splines::ModelSpec scenario_bnp_spec(ScenarioId id, int knots);
// Normal linear regression comparator: every covariate enters linearly.
splines::ModelSpec scenario_linear_spec(ScenarioId id);

enum class Estimator { BsplinesDdp, BayesLinear, Kernel, Pooled };
Estimator parse_estimator(const std::string& text);  // "bnp", "linear", "kernel", "pooled"
std::string estimator_name(Estimator estimator);

struct StudyConfig {
  ScenarioId scenario = ScenarioId::I;
  Estimator estimator = Estimator::BsplinesDdp;
  int n_nondiseased = 200;
  int n_diseased = 200;
  int replicates = 50;  // desk scale; paper_scale() bumps the MCMC budget
  int knots = 4;
  int components = 10;
  int nsim = 3000;
  int nburn = 500;
  int kernel_boot = 200;
  int grid_points = 101;
  double level = 0.95;
  int threads = 1;
};

// 100 replicates with 8000 retained draws after a 2000-iteration burn-in.
StudyConfig paper_scale(StudyConfig config);

struct ReplicateResult {
  int index = 0;
  bool failed = false;
  std::string error;
  double ermse = 0.0;
  double aauc_bias = 0.0;
  double coverage_fraction = 0.0;  // share of grid points whose band covers the truth
  bool aauc_covered = false;
};

struct StudyReport {
  StudyConfig config;
  std::vector<ReplicateResult> replicates;  // in replicate-index order
  int failures = 0;
  // aggregates over successful replicates
  double mean_ermse_x100 = 0.0;
  double sd_ermse_x100 = 0.0;
  double mean_aauc_bias = 0.0;
  double coverage_percent = 0.0;
  double aauc_coverage_percent = 0.0;
};

// Aggregation alone (exposed so reports can be rebuilt or merged); aggregates
// do not depend on the order of the replicate list.
StudyReport summarize_study(const StudyConfig& config, std::vector<ReplicateResult> replicates);

// Generate/fit/score `replicates` datasets. Replicate r runs on rng.child(r),
// so results are independent of execution order and thread count; failures
// are recorded per replicate and excluded from the aggregates.
StudyReport coverage_study(const StudyConfig& config, rng::RngStream& rng);

void write_study_csv(const std::string& path, const StudyReport& report);
void write_study_json(const std::string& path, const StudyReport& report);
// The JSON text write_study_json writes, for embedding in larger documents.
std::string study_json_text(const StudyReport& report);

// Head-to-head fit of the mixture model against the linear comparator on
// shared replicates: predictive criteria (both computed on the nondiseased
// fit) and curve accuracy.
struct ComparisonReport {
  StudyConfig config;
  int replicates = 0;
  int failures = 0;
  int ddp_wins_waic = 0;   // mixture WAIC strictly lower
  int ddp_wins_lpml = 0;   // mixture LPML strictly higher
  int ddp_wins_ermse = 0;  // linear ERMSE strictly larger
  double mean_ermse_ddp_x100 = 0.0;
  double mean_ermse_linear_x100 = 0.0;
};
ComparisonReport model_comparison_study(const StudyConfig& config, rng::RngStream& rng);

// ---- adjusted-vs-pooled inequality on true curves ----
//
// For location families y = mu_g(x) + sd_g * eps with a covariate law shared
// by the two groups, the adjusted curve dominates the pooled curve whenever
// the covariate-specific curves are concave. Both curves here are Monte
// Carlo oracles of the truth, not estimates.
struct ConcavitySetup {
  std::function<double(double)> mean_nondiseased;
  std::function<double(double)> mean_diseased;
  double sd_nondiseased = 0.3;
  double sd_diseased = 0.3;
  double covariate_mean = 0.0;
  double covariate_sd = 0.15;
};

struct ConcavityReport {
  bool holds = false;           // max_violation <= 1e-3
  double max_violation = 0.0;   // max over grid of pooled - adjusted
  Eigen::VectorXd grid;
  Eigen::VectorXd adjusted;
  Eigen::VectorXd pooled;
};

ConcavityReport concavity_inequality_check(const ConcavitySetup& setup,
                                           const Eigen::VectorXd& grid, int mc_draws,
                                           std::uint64_t seed);

}  // namespace aroc::simlab
