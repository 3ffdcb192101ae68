#include "aroc/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <thread>
#include <utility>

#include "aroc/common.hpp"
#include "aroc/ddp.hpp"
#include "aroc/kernel.hpp"
#include "aroc/modelcrit.hpp"
#include "aroc/stats.hpp"
#include "json.hpp"

namespace aroc::simlab {

namespace {

constexpr int kOracleDraws = 1000000;
constexpr std::uint64_t kOracleSeedBase = 770000;
// sd ratio nondiseased/diseased, shared by all six scenarios
constexpr double kSdRatio = kNondiseasedSd / kDiseasedSd;

double positive_part(double u) { return u > 0.0 ? u : 0.0; }

bool uses_x2(ScenarioId id) { return id == ScenarioId::V; }
bool uses_x3(ScenarioId id) { return id == ScenarioId::VI; }

double quiet_nan() { return std::numeric_limits<double>::quiet_NaN(); }

template <typename Body>
void parallel_for(int n, int threads, const Body& body) {
  const int workers = std::max(1, std::min(threads, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&body, w, n, workers] {
      for (int i = w; i < n; i += workers) body(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

// ---- scenario definitions ----

ScenarioId parse_scenario(const std::string& text) {
  static const std::map<std::string, ScenarioId> table = {
      {"I", ScenarioId::I},   {"II", ScenarioId::II}, {"III", ScenarioId::III},
      {"IV", ScenarioId::IV}, {"V", ScenarioId::V},   {"VI", ScenarioId::VI}};
  auto it = table.find(text);
  if (it == table.end()) throw DataError("unknown scenario '" + text + "' (expected I..VI)");
  return it->second;
}

std::string scenario_name(ScenarioId id) {
  switch (id) {
    case ScenarioId::I: return "I";
    case ScenarioId::II: return "II";
    case ScenarioId::III: return "III";
    case ScenarioId::IV: return "IV";
    case ScenarioId::V: return "V";
    case ScenarioId::VI: return "VI";
  }
  throw DataError("invalid scenario id");
}

double nondiseased_mean(ScenarioId id, double x1, double x2, double x3) {
  switch (id) {
    case ScenarioId::I:
      return 0.5;
    case ScenarioId::II:
      return 0.5 + (2.0 * x1 - 10.0) / 23.0;
    case ScenarioId::III:
      return 0.25 + 0.5 * (2.0 * x1 - 10.0) / 23.0;
    case ScenarioId::IV: {
      // steep truncated-power cubic trend
      const double u = (x1 + 8.0) / 23.0;
      const double c1 = positive_part(u - 0.2);
      const double c2 = positive_part(u - 0.65);
      return -5.0 + 3.0 * u * u - 25.0 * c1 * c1 * c1 + 250.0 * c2 * c2 * c2;
    }
    case ScenarioId::V: {
      const double w1 = (2.0 * x1 - 10.0) / 10.0;
      const double w2 = (2.0 * x2 - 10.0) / 10.0;
      return 0.5 * std::exp(w1) - 2.0 * w2 * w2;
    }
    case ScenarioId::VI: {
      // one smooth per level of the binary covariate
      const double w = (2.0 * x1 - 10.0) / 10.0;
      return -std::sin(0.7 * M_PI * (w + 30.0)) * x3 + w * w * (1.0 - x3);
    }
  }
  throw DataError("invalid scenario id");
}

double diseased_mean(ScenarioId id, double x1) {
  switch (id) {
    case ScenarioId::I:
      return 1.0;
    case ScenarioId::II:
      return 1.0 + (2.0 * x1 - 10.0) / 23.0;
    case ScenarioId::III:
      return 0.75 + (2.0 * x1 - 10.0) / 23.0;
    case ScenarioId::IV:
      return -3.0 - 0.6 * (x1 + 8.0) / 23.0;
    case ScenarioId::V: {
      const double w1 = (2.0 * x1 - 10.0) / 10.0;
      return 0.5 * std::sin(M_PI * (w1 + 1.0)) + 0.5 * std::exp(w1);
    }
    case ScenarioId::VI: {
      const double w = (2.0 * x1 - 10.0) / 10.0;
      return 0.5 + w * w;
    }
  }
  throw DataError("invalid scenario id");
}

std::vector<std::string> scenario_covariates(ScenarioId id) {
  std::vector<std::string> names = {"x1"};
  if (uses_x2(id)) names.push_back("x2");
  if (uses_x3(id)) names.push_back("x3");
  return names;
}

data::Dataset generate_scenario(ScenarioId id, int n_nondiseased, int n_diseased,
                                rng::RngStream& rng) {
  if (n_nondiseased < 2 || n_diseased < 2)
    throw DataError("generate_scenario: need at least 2 observations per group");
  data::Dataset d;
  const int n = n_nondiseased + n_diseased;
  d.y.reserve(n);
  d.status.reserve(n);
  for (const auto& name : scenario_covariates(id)) d.covariates[name].reserve(n);

  for (int i = 0; i < n; ++i) {
    const bool diseased = i >= n_nondiseased;
    const double x1 = diseased ? rng.skew_normal(3.0, 16.0, 1.0)
                               : rng.skew_normal(0.0, 25.0, 2.0);
    double x2 = 0.0, x3 = 0.0;
    d.covariates["x1"].push_back(x1);
    if (uses_x2(id)) {
      x2 = diseased ? rng.skew_normal(3.0, 16.0, 1.0) : rng.skew_normal(0.0, 25.0, 2.0);
      d.covariates["x2"].push_back(x2);
    }
    if (uses_x3(id)) {
      x3 = static_cast<double>(rng.bernoulli(0.5));
      d.covariates["x3"].push_back(x3);
    }
    const double mean = diseased ? diseased_mean(id, x1) : nondiseased_mean(id, x1, x2, x3);
    const double sd = diseased ? kDiseasedSd : kNondiseasedSd;
    d.y.push_back(rng.normal(mean, sd));
    d.status.push_back(diseased ? 1 : 0);
  }
  d.validate();
  return d;
}

// ---- ground-truth oracle ----
//
// Placement values in these location-scale scenarios reduce to
//   U = Phi(-a(X) + kSdRatio * Z) with Z standard normal,
// so the true curve is E_X[Phi(a(X) + kSdRatio * Phi^{-1}(t))] over the
// diseased covariate law, and the area is E_X[Phi(a(X)/sqrt(1+kSdRatio^2))].

namespace {

std::mutex g_oracle_mutex;
std::map<int, std::vector<double>> g_oracle_memo;  // scenario -> standardized shifts a(x)
std::string g_cache_dir;
bool g_cache_dir_set = false;

std::string oracle_cache_dir_locked() {
  if (g_cache_dir_set) return g_cache_dir;
  if (const char* env = std::getenv("AROC_ORACLE_CACHE")) return env;
  return (std::filesystem::temp_directory_path() / "aroc-oracle-cache").string();
}

std::string oracle_cache_path(const std::string& dir, ScenarioId id) {
  return (std::filesystem::path(dir) / ("scenario_" + scenario_name(id) + ".bin")).string();
}

constexpr std::uint64_t kCacheMagic = 0x41524f4302u;  // file identity + format version

bool load_oracle_cache(const std::string& path, std::vector<double>& shifts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::uint64_t magic = 0, count = 0;
  in.read(reinterpret_cast<char*>(&magic), sizeof magic);
  in.read(reinterpret_cast<char*>(&count), sizeof count);
  if (!in || magic != kCacheMagic || count != static_cast<std::uint64_t>(kOracleDraws))
    return false;
  shifts.resize(kOracleDraws);
  in.read(reinterpret_cast<char*>(shifts.data()),
          static_cast<std::streamsize>(shifts.size() * sizeof(double)));
  return static_cast<bool>(in);
}

void save_oracle_cache(const std::string& path, const std::vector<double>& shifts) {
  std::error_code ec;
  std::filesystem::create_directories(std::filesystem::path(path).parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) return;  // caching is best-effort
  const std::uint64_t magic = kCacheMagic, count = shifts.size();
  out.write(reinterpret_cast<const char*>(&magic), sizeof magic);
  out.write(reinterpret_cast<const char*>(&count), sizeof count);
  out.write(reinterpret_cast<const char*>(shifts.data()),
            static_cast<std::streamsize>(shifts.size() * sizeof(double)));
}

std::vector<double> build_oracle_shifts(ScenarioId id) {
  rng::RngStream rng(kOracleSeedBase + static_cast<std::uint64_t>(id));
  std::vector<double> shifts(kOracleDraws);
  for (int i = 0; i < kOracleDraws; ++i) {
    const double x1 = rng.skew_normal(3.0, 16.0, 1.0);
    const double x2 = uses_x2(id) ? rng.skew_normal(3.0, 16.0, 1.0) : 0.0;
    const double x3 = uses_x3(id) ? static_cast<double>(rng.bernoulli(0.5)) : 0.0;
    shifts[i] = (diseased_mean(id, x1) - nondiseased_mean(id, x1, x2, x3)) / kDiseasedSd;
  }
  return shifts;
}

const std::vector<double>& oracle_shifts(ScenarioId id) {
  std::lock_guard<std::mutex> lock(g_oracle_mutex);
  auto it = g_oracle_memo.find(static_cast<int>(id));
  if (it != g_oracle_memo.end()) return it->second;

  const std::string dir = oracle_cache_dir_locked();
  std::vector<double> shifts;
  const std::string path = dir.empty() ? std::string() : oracle_cache_path(dir, id);
  if (path.empty() || !load_oracle_cache(path, shifts)) {
    shifts = build_oracle_shifts(id);
    if (!path.empty()) save_oracle_cache(path, shifts);
  }
  return g_oracle_memo.emplace(static_cast<int>(id), std::move(shifts)).first->second;
}

}  // namespace

void set_oracle_cache_dir(const std::string& dir) {
  std::lock_guard<std::mutex> lock(g_oracle_mutex);
  g_cache_dir = dir;
  g_cache_dir_set = true;
  g_oracle_memo.clear();
}

double true_aroc(ScenarioId id, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DataError("true_aroc: t must lie in [0, 1]");
  if (t == 0.0) return 0.0;
  if (t == 1.0) return 1.0;
  const double q = rng::std_normal_quantile(t);
  if (id == ScenarioId::I) return rng::std_normal_cdf(0.5 + kSdRatio * q);
  const auto& shifts = oracle_shifts(id);
  double acc = 0.0;
  for (double a : shifts) acc += rng::std_normal_cdf(a + kSdRatio * q);
  return acc / static_cast<double>(shifts.size());
}

Eigen::VectorXd true_aroc_grid(ScenarioId id, const Eigen::VectorXd& grid) {
  Eigen::VectorXd out(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) out[i] = true_aroc(id, grid[i]);
  return out;
}

double true_aauc(ScenarioId id) {
  const double scale = std::sqrt(1.0 + kSdRatio * kSdRatio);
  if (id == ScenarioId::I) return rng::std_normal_cdf(0.5 / scale);
  const auto& shifts = oracle_shifts(id);
  double acc = 0.0;
  for (double a : shifts) acc += rng::std_normal_cdf(a / scale);
  return acc / static_cast<double>(shifts.size());
}

double ermse(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth) {
  if (estimate.size() != truth.size() || estimate.size() == 0)
    throw DataError("ermse: curves must share a nonempty grid");
  std::vector<double> sq(static_cast<std::size_t>(estimate.size()));
  for (Eigen::Index i = 0; i < estimate.size(); ++i) {
    const double d = estimate[i] - truth[i];
    sq[static_cast<std::size_t>(i)] = d * d;
  }
  return std::sqrt(stats::mean(sq));
}

// ---- estimator configurations ----

splines::ModelSpec scenario_bnp_spec(ScenarioId id, int knots) {
  splines::ModelSpec spec;
  switch (id) {
    case ScenarioId::I:
    case ScenarioId::II:
    case ScenarioId::III:
    case ScenarioId::IV:
      spec.terms = {splines::SmoothTerm{"x1", knots}};
      break;
    case ScenarioId::V:
      spec.terms = {splines::SmoothTerm{"x1", knots}, splines::SmoothTerm{"x2", knots}};
      break;
    case ScenarioId::VI:
      spec.terms = {splines::FactorSmoothTerm{"x1", "x3", knots}};
      break;
  }
  return spec;
}

splines::ModelSpec scenario_linear_spec(ScenarioId id) {
  splines::ModelSpec spec;
  switch (id) {
    case ScenarioId::I:
    case ScenarioId::II:
    case ScenarioId::III:
    case ScenarioId::IV:
      spec.terms = {splines::LinearTerm{"x1"}};
      break;
    case ScenarioId::V:
      spec.terms = {splines::LinearTerm{"x1"}, splines::LinearTerm{"x2"}};
      break;
    case ScenarioId::VI:
      spec.terms = {splines::LinearTerm{"x1"}, splines::FactorTerm{"x3"}};
      break;
  }
  return spec;
}

Estimator parse_estimator(const std::string& text) {
  if (text == "bnp") return Estimator::BsplinesDdp;
  if (text == "linear") return Estimator::BayesLinear;
  if (text == "kernel") return Estimator::Kernel;
  if (text == "pooled") return Estimator::Pooled;
  throw DataError("unknown estimator '" + text + "' (expected bnp, linear, kernel, or pooled)");
}

std::string estimator_name(Estimator estimator) {
  switch (estimator) {
    case Estimator::BsplinesDdp: return "bnp";
    case Estimator::BayesLinear: return "linear";
    case Estimator::Kernel: return "kernel";
    case Estimator::Pooled: return "pooled";
  }
  throw DataError("invalid estimator");
}

StudyConfig paper_scale(StudyConfig config) {
  config.replicates = 100;
  config.nsim = 10000;
  config.nburn = 2000;
  return config;
}

// ---- coverage study ----

namespace {

int spec_dimension(const splines::ModelSpec& spec) {
  int q = spec.intercept ? 1 : 0;
  for (const auto& term : spec.terms) q += splines::term_dimension(term);
  return q;
}

void check_config(const StudyConfig& c) {
  if (c.replicates < 1) throw DataError("study: need at least one replicate");
  if (c.grid_points < 2) throw DataError("study: need at least two grid points");
  if (!(c.level > 0.0 && c.level < 1.0)) throw DataError("study: level must lie in (0, 1)");
  if (c.nsim <= c.nburn || c.nburn < 0) throw DataError("study: need nsim > nburn >= 0");
  if (c.estimator == Estimator::Kernel && scenario_covariates(c.scenario).size() != 1)
    throw DataError("study: the kernel estimator handles a single continuous covariate; scenario " +
                    scenario_name(c.scenario) + " has more");
}

// One generate/fit/score pass. Failures are recorded, not thrown: a study
// aggregates whatever replicates succeed.
ReplicateResult run_replicate(const StudyConfig& c, const Eigen::VectorXd& grid,
                              const Eigen::VectorXd& truth, double truth_aauc, int index,
                              rng::RngStream base) {
  ReplicateResult out;
  out.index = index;
  try {
    rng::RngStream data_rng = base.child(0);
    rng::RngStream fit_rng = base.child(1);
    const data::Dataset data =
        generate_scenario(c.scenario, c.n_nondiseased, c.n_diseased, data_rng);

    curves::CurveEstimate curve;
    curves::ScalarEstimate aauc;
    switch (c.estimator) {
      case Estimator::BsplinesDdp:
      case Estimator::BayesLinear: {
        const bool mixture = c.estimator == Estimator::BsplinesDdp;
        const splines::ModelSpec spec = mixture ? scenario_bnp_spec(c.scenario, c.knots)
                                                : scenario_linear_spec(c.scenario);
        const ddp::PriorSpec prior =
            ddp::default_prior(spec_dimension(spec), mixture ? c.components : 1);
        ddp::GibbsConfig gibbs;
        gibbs.nsim = c.nsim;
        gibbs.nburn = c.nburn;
        const ddp::FitResult fit = ddp::gibbs_fit(data.subset(0), spec, prior, gibbs, fit_rng);
        curves::ArocOptions options;
        options.grid = grid;
        options.level = c.level;
        const curves::ArocResult res = curves::adjusted_roc(fit, data.subset(1), options, fit_rng);
        curve = res.curve;
        aauc = res.aauc;
        break;
      }
      case Estimator::Kernel: {
        const kernel::KernelArocResult res =
            kernel::kernel_aroc(data, grid, c.kernel_boot, c.level, fit_rng);
        curve = res.curve;
        aauc = res.aauc;
        break;
      }
      case Estimator::Pooled: {
        const data::Dataset nondiseased = data.subset(0);
        const data::Dataset diseased = data.subset(1);
        const curves::PooledResult res = curves::pooled_roc_bb(
            nondiseased.y, diseased.y, grid, c.nsim - c.nburn, c.level, fit_rng);
        curve = res.curve;
        aauc = res.auc;
        break;
      }
    }

    out.ermse = ermse(curve.mean, truth);
    out.aauc_bias = aauc.mean - truth_aauc;
    int covered = 0;
    for (Eigen::Index g = 0; g < grid.size(); ++g)
      if (curve.lower[g] <= truth[g] && truth[g] <= curve.upper[g]) ++covered;
    out.coverage_fraction = static_cast<double>(covered) / static_cast<double>(grid.size());
    out.aauc_covered = aauc.lower <= truth_aauc && truth_aauc <= aauc.upper;
  } catch (const std::exception& e) {
    out.failed = true;
    out.error = e.what();
  }
  return out;
}

}  // namespace

StudyReport summarize_study(const StudyConfig& config, std::vector<ReplicateResult> replicates) {
  std::sort(replicates.begin(), replicates.end(),
            [](const ReplicateResult& a, const ReplicateResult& b) { return a.index < b.index; });
  StudyReport report;
  report.config = config;

  std::vector<double> ermses, biases, cover_fracs, aauc_cover;
  for (const auto& r : replicates) {
    if (r.failed) continue;
    ermses.push_back(r.ermse);
    biases.push_back(r.aauc_bias);
    cover_fracs.push_back(r.coverage_fraction);
    aauc_cover.push_back(r.aauc_covered ? 1.0 : 0.0);
  }
  report.failures = static_cast<int>(replicates.size() - ermses.size());
  report.replicates = std::move(replicates);

  if (ermses.empty()) {
    report.mean_ermse_x100 = quiet_nan();
    report.sd_ermse_x100 = quiet_nan();
    report.mean_aauc_bias = quiet_nan();
    report.coverage_percent = quiet_nan();
    report.aauc_coverage_percent = quiet_nan();
    return report;
  }
  report.mean_ermse_x100 = 100.0 * stats::mean(ermses);
  report.sd_ermse_x100 = ermses.size() > 1 ? 100.0 * stats::sd(ermses) : 0.0;
  report.mean_aauc_bias = stats::mean(biases);
  report.coverage_percent = 100.0 * stats::mean(cover_fracs);
  report.aauc_coverage_percent = 100.0 * stats::mean(aauc_cover);
  return report;
}

StudyReport coverage_study(const StudyConfig& config, rng::RngStream& rng) {
  check_config(config);
  const Eigen::VectorXd grid = stats::linspace(0.0, 1.0, config.grid_points);
  const Eigen::VectorXd truth = true_aroc_grid(config.scenario, grid);
  const double truth_aauc = true_aauc(config.scenario);

  std::vector<ReplicateResult> results(static_cast<std::size_t>(config.replicates));
  std::vector<rng::RngStream> streams;
  streams.reserve(results.size());
  for (int r = 0; r < config.replicates; ++r)
    streams.push_back(rng.child(static_cast<std::uint64_t>(r)));

  parallel_for(config.replicates, config.threads, [&](int r) {
    results[static_cast<std::size_t>(r)] =
        run_replicate(config, grid, truth, truth_aauc, r, streams[static_cast<std::size_t>(r)]);
  });
  return summarize_study(config, std::move(results));
}

// ---- report serialization ----

void write_study_csv(const std::string& path, const StudyReport& report) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out.precision(17);
  out << "replicate,failed,ermse,aauc_bias,coverage_fraction,aauc_covered,error\n";
  for (const auto& r : report.replicates) {
    out << r.index << ',' << (r.failed ? 1 : 0) << ',';
    if (r.failed) {
      std::string msg = r.error;
      for (char& ch : msg)
        if (ch == ',' || ch == '\n' || ch == '\r') ch = ' ';
      out << ",,,," << msg << '\n';
    } else {
      out << r.ermse << ',' << r.aauc_bias << ',' << r.coverage_fraction << ','
          << (r.aauc_covered ? 1 : 0) << ",\n";
    }
  }
}

namespace {

nlohmann::json config_json(const StudyConfig& c) {
  return {{"scenario", scenario_name(c.scenario)},
          {"estimator", estimator_name(c.estimator)},
          {"n_nondiseased", c.n_nondiseased},
          {"n_diseased", c.n_diseased},
          {"replicates", c.replicates},
          {"knots", c.knots},
          {"components", c.components},
          {"nsim", c.nsim},
          {"nburn", c.nburn},
          {"kernel_boot", c.kernel_boot},
          {"grid_points", c.grid_points},
          {"level", c.level},
          {"threads", c.threads}};
}

}  // namespace

std::string study_json_text(const StudyReport& report) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["config"] = config_json(report.config);
  j["aggregate"] = {{"failures", report.failures},
                    {"mean_ermse_x100", report.mean_ermse_x100},
                    {"sd_ermse_x100", report.sd_ermse_x100},
                    {"mean_aauc_bias", report.mean_aauc_bias},
                    {"coverage_percent", report.coverage_percent},
                    {"aauc_coverage_percent", report.aauc_coverage_percent}};
  nlohmann::json reps = nlohmann::json::array();
  for (const auto& r : report.replicates) {
    nlohmann::json row = {{"index", r.index}, {"failed", r.failed}};
    if (r.failed) {
      row["error"] = r.error;
    } else {
      row["ermse"] = r.ermse;
      row["aauc_bias"] = r.aauc_bias;
      row["coverage_fraction"] = r.coverage_fraction;
      row["aauc_covered"] = r.aauc_covered;
    }
    reps.push_back(std::move(row));
  }
  j["replicates"] = std::move(reps);
  return j.dump(2);
}

void write_study_json(const std::string& path, const StudyReport& report) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << study_json_text(report) << '\n';
}

// ---- mixture vs linear comparison ----

ComparisonReport model_comparison_study(const StudyConfig& config, rng::RngStream& rng) {
  check_config(config);
  const Eigen::VectorXd grid = stats::linspace(0.0, 1.0, config.grid_points);
  const Eigen::VectorXd truth = true_aroc_grid(config.scenario, grid);

  struct Row {
    bool failed = true;
    double waic_ddp = 0.0, waic_lin = 0.0;
    double lpml_ddp = 0.0, lpml_lin = 0.0;
    double ermse_ddp = 0.0, ermse_lin = 0.0;
  };
  std::vector<Row> rows(static_cast<std::size_t>(config.replicates));
  std::vector<rng::RngStream> streams;
  streams.reserve(rows.size());
  for (int r = 0; r < config.replicates; ++r)
    streams.push_back(rng.child(static_cast<std::uint64_t>(r)));

  parallel_for(config.replicates, config.threads, [&](int r) {
    Row& row = rows[static_cast<std::size_t>(r)];
    try {
      rng::RngStream base = streams[static_cast<std::size_t>(r)];
      rng::RngStream data_rng = base.child(0);
      const data::Dataset data =
          generate_scenario(config.scenario, config.n_nondiseased, config.n_diseased, data_rng);
      const data::Dataset nondiseased = data.subset(0);
      const data::Dataset diseased = data.subset(1);

      ddp::GibbsConfig gibbs;
      gibbs.nsim = config.nsim;
      gibbs.nburn = config.nburn;
      curves::ArocOptions options;
      options.grid = grid;
      options.level = config.level;

      auto fit_one = [&](const splines::ModelSpec& spec, int components, rng::RngStream fit_rng,
                         double& waic, double& lpml, double& err) {
        const ddp::PriorSpec prior = ddp::default_prior(spec_dimension(spec), components);
        const ddp::FitResult fit = ddp::gibbs_fit(nondiseased, spec, prior, gibbs, fit_rng);
        const modelcrit::CriteriaReport crit = modelcrit::criteria(fit);
        waic = crit.waic;
        lpml = crit.lpml;
        const curves::ArocResult res = curves::adjusted_roc(fit, diseased, options, fit_rng);
        err = ermse(res.curve.mean, truth);
      };
      fit_one(scenario_bnp_spec(config.scenario, config.knots), config.components, base.child(1),
              row.waic_ddp, row.lpml_ddp, row.ermse_ddp);
      fit_one(scenario_linear_spec(config.scenario), 1, base.child(2), row.waic_lin, row.lpml_lin,
              row.ermse_lin);
      row.failed = false;
    } catch (const std::exception&) {
      row.failed = true;
    }
  });

  ComparisonReport report;
  report.config = config;
  report.replicates = config.replicates;
  std::vector<double> ermse_ddp, ermse_lin;
  for (const auto& row : rows) {
    if (row.failed) {
      ++report.failures;
      continue;
    }
    if (row.waic_ddp < row.waic_lin) ++report.ddp_wins_waic;
    if (row.lpml_ddp > row.lpml_lin) ++report.ddp_wins_lpml;
    if (row.ermse_lin > row.ermse_ddp) ++report.ddp_wins_ermse;
    ermse_ddp.push_back(row.ermse_ddp);
    ermse_lin.push_back(row.ermse_lin);
  }
  report.mean_ermse_ddp_x100 = ermse_ddp.empty() ? quiet_nan() : 100.0 * stats::mean(ermse_ddp);
  report.mean_ermse_linear_x100 =
      ermse_lin.empty() ? quiet_nan() : 100.0 * stats::mean(ermse_lin);
  return report;
}

// ---- adjusted-vs-pooled inequality on true curves ----

ConcavityReport concavity_inequality_check(const ConcavitySetup& setup,
                                           const Eigen::VectorXd& grid, int mc_draws,
                                           std::uint64_t seed) {
  if (!setup.mean_nondiseased || !setup.mean_diseased)
    throw DataError("concavity check: both mean functions are required");
  if (!(setup.sd_nondiseased > 0.0) || !(setup.sd_diseased > 0.0))
    throw DataError("concavity check: group sds must be positive");
  if (!(setup.covariate_sd >= 0.0))
    throw DataError("concavity check: covariate sd must be nonnegative");
  if (mc_draws < 100) throw DataError("concavity check: need at least 100 draws");
  if (grid.size() < 2) throw DataError("concavity check: need at least two grid points");
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0))
      throw DataError("concavity check: grid values must lie in [0, 1]");

  rng::RngStream rng(seed);
  const double b = setup.sd_nondiseased / setup.sd_diseased;
  const std::size_t m = static_cast<std::size_t>(mc_draws);

  // standardized separations over the (shared) covariate law, for the
  // covariate-adjusted truth
  std::vector<double> shifts(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double x = rng.normal(setup.covariate_mean, setup.covariate_sd);
    shifts[i] = (setup.mean_diseased(x) - setup.mean_nondiseased(x)) / setup.sd_diseased;
  }
  // marginal samples for the pooled truth
  std::vector<double> y0(m), y1(m);
  for (std::size_t i = 0; i < m; ++i)
    y0[i] = setup.mean_nondiseased(rng.normal(setup.covariate_mean, setup.covariate_sd)) +
            rng.normal(0.0, setup.sd_nondiseased);
  for (std::size_t i = 0; i < m; ++i)
    y1[i] = setup.mean_diseased(rng.normal(setup.covariate_mean, setup.covariate_sd)) +
            rng.normal(0.0, setup.sd_diseased);
  std::sort(y0.begin(), y0.end());
  std::sort(y1.begin(), y1.end());

  ConcavityReport report;
  report.grid = grid;
  report.adjusted.resize(grid.size());
  report.pooled.resize(grid.size());
  double worst = -std::numeric_limits<double>::infinity();
  for (Eigen::Index g = 0; g < grid.size(); ++g) {
    const double t = grid[g];
    double adjusted, pooled;
    if (t == 0.0) {
      adjusted = pooled = 0.0;
    } else if (t == 1.0) {
      adjusted = pooled = 1.0;
    } else {
      const double q = rng::std_normal_quantile(t);
      double acc = 0.0;
      for (double a : shifts) acc += rng::std_normal_cdf(a + b * q);
      adjusted = acc / static_cast<double>(m);
      const double threshold = stats::quantile_sorted(y0, 1.0 - t);
      const auto above = y1.end() - std::upper_bound(y1.begin(), y1.end(), threshold);
      pooled = static_cast<double>(above) / static_cast<double>(m);
    }
    report.adjusted[g] = adjusted;
    report.pooled[g] = pooled;
    worst = std::max(worst, pooled - adjusted);
  }
  report.max_violation = worst;
  report.holds = worst <= 1e-3;
  return report;
}

}  // namespace aroc::simlab
