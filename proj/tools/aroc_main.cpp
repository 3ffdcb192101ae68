// aroc: covariate-adjusted ROC analysis from the command line.
//
// Subcommands: fit-bnp, fit-bsp, fit-kernel, pooled, thresholds, ppc,
// simulate. Every run writes one JSON document carrying format_version, the
// full option echo, the seed, and a runtime stamp; curve-shaped results can
// additionally be emitted as tidy CSV. Exit codes: 0 success, 1 usage,
// 2 data validation, 3 numerical failure.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "aroc/common.hpp"
#include "aroc/curves.hpp"
#include "aroc/dataset.hpp"
#include "aroc/ddp.hpp"
#include "aroc/formula.hpp"
#include "aroc/kernel.hpp"
#include "aroc/modelcrit.hpp"
#include "aroc/rng.hpp"
#include "aroc/simlab.hpp"
#include "aroc/splines.hpp"
#include "aroc/stats.hpp"

using nlohmann::json;
using namespace aroc;

namespace {

json scalar_json(const curves::ScalarEstimate& s) {
  return {{"mean", s.mean}, {"lower", s.lower}, {"upper", s.upper}};
}

json curve_json(const curves::CurveEstimate& c) {
  json t = json::array(), mean = json::array(), lower = json::array(), upper = json::array();
  for (Eigen::Index i = 0; i < c.grid.size(); ++i) {
    t.push_back(c.grid[i]);
    mean.push_back(c.mean[i]);
    lower.push_back(c.lower[i]);
    upper.push_back(c.upper[i]);
  }
  return {{"t", t}, {"mean", mean}, {"lower", lower}, {"upper", upper}};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text << '\n';
}

// ---- shared option bundles ----

struct IoOptions {
  std::string input;
  std::string out;
  std::string curve_csv;
  std::string status_column = "status";
  std::string tag = "0";
  std::uint64_t seed = 1;
  double level = 0.95;
  int grid_points = 101;
};

void add_io_options(CLI::App* sub, IoOptions& io, bool with_curve_csv = true) {
  sub->add_option("--in", io.input, "input CSV (header row; '.' decimal separator)")
      ->required();
  sub->add_option("--out", io.out, "output JSON path")->required();
  if (with_curve_csv)
    sub->add_option("--curve-csv", io.curve_csv, "also write the curve as tidy CSV");
  sub->add_option("--status", io.status_column, "status column name")->capture_default_str();
  sub->add_option("--tag", io.tag, "status value marking the nondiseased group")
      ->capture_default_str();
  sub->add_option("--seed", io.seed, "RNG seed (echoed in the output)")->capture_default_str();
  sub->add_option("--level", io.level, "credible/confidence level")->capture_default_str();
  sub->add_option("--grid-points", io.grid_points, "FPF grid resolution")->capture_default_str();
}

json io_echo(const IoOptions& io) {
  return {{"input", io.input},         {"out", io.out},
          {"curve_csv", io.curve_csv}, {"status_column", io.status_column},
          {"nondiseased_tag", io.tag}, {"seed", io.seed},
          {"level", io.level},         {"grid_points", io.grid_points}};
}

struct FitOptions {
  std::string formula;
  int knots = 0;  // default K for s(name) terms written without K=
  int components = 10;
  double alpha = 1.0;
  int nsim = 10000;
  int nburn = 2000;
};

void add_fit_options(CLI::App* sub, FitOptions& fit, bool with_components = true) {
  sub->add_option("--formula", fit.formula,
                  "model formula, e.g. 'y ~ s(age, K=4)' or 'y ~ gender + s(age, K=0, by=gender)'")
      ->required();
  sub->add_option("--knots", fit.knots, "interior knots for s() terms that omit K=")
      ->capture_default_str();
  if (with_components)
    sub->add_option("--components", fit.components, "mixture truncation level")
        ->capture_default_str();
  sub->add_option("--alpha", fit.alpha, "stick-breaking concentration")->capture_default_str();
  sub->add_option("--nsim", fit.nsim, "total MCMC iterations")->capture_default_str();
  sub->add_option("--nburn", fit.nburn, "burn-in iterations discarded")->capture_default_str();
}

json fit_echo(const FitOptions& fit) {
  return {{"formula", fit.formula}, {"default_knots", fit.knots},
          {"components", fit.components}, {"alpha", fit.alpha},
          {"nsim", fit.nsim}, {"nburn", fit.nburn}};
}

int spec_dimension(const splines::ModelSpec& spec) {
  int q = spec.intercept ? 1 : 0;
  for (const auto& term : spec.terms) q += splines::term_dimension(term);
  return q;
}

// Parse the formula, read the CSV named by its response, and fit the
// nondiseased sample. Returns the fit plus the diseased subset.
struct FittedData {
  formula::ParsedFormula parsed;
  data::Dataset data;
  ddp::FitResult fit;
};

FittedData fit_from_csv(const IoOptions& io, const FitOptions& opts, rng::RngStream& rng) {
  FittedData out;
  out.parsed = formula::parse_formula(opts.formula, opts.knots);
  out.data = data::read_csv(io.input, out.parsed.response, io.status_column, io.tag);
  ddp::PriorSpec prior = ddp::default_prior(spec_dimension(out.parsed.spec), opts.components);
  prior.alpha = opts.alpha;
  ddp::GibbsConfig config;
  config.nsim = opts.nsim;
  config.nburn = opts.nburn;
  out.fit = ddp::gibbs_fit(out.data.subset(0), out.parsed.spec, prior, config, rng);
  return out;
}

// ---- per-command payloads ----

json run_fit_model(const IoOptions& io, const FitOptions& opts,
                   const std::vector<double>& paauc_t0s) {
  rng::RngStream rng(io.seed);
  FittedData fitted = fit_from_csv(io, opts, rng);

  curves::ArocOptions options;
  options.grid = stats::linspace(0.0, 1.0, io.grid_points);
  options.level = io.level;
  options.paauc_t0s = paauc_t0s;
  const curves::ArocResult roc = curves::adjusted_roc(fitted.fit, fitted.data.subset(1), options, rng);
  const modelcrit::CriteriaReport crit = modelcrit::criteria(fitted.fit);

  if (!io.curve_csv.empty())
    data::write_curve_csv(io.curve_csv, roc.curve.grid, roc.curve.mean, roc.curve.lower,
                          roc.curve.upper);

  std::vector<double> occupied(fitted.fit.occupied.begin(), fitted.fit.occupied.end());
  json paauc = json::array();
  for (std::size_t k = 0; k < paauc_t0s.size(); ++k) {
    json entry = scalar_json(roc.paauc[k]);
    entry["t0"] = paauc_t0s[k];
    paauc.push_back(std::move(entry));
  }
  return {{"curve", curve_json(roc.curve)},
          {"aauc", scalar_json(roc.aauc)},
          {"paauc", paauc},
          {"lpml", crit.lpml},
          {"waic", crit.waic},
          {"n_nondiseased", fitted.data.count(0)},
          {"n_diseased", fitted.data.count(1)},
          {"design_dimension", fitted.fit.design.q},
          {"occupied_components_mean", occupied.empty() ? 0.0 : stats::mean(occupied)}};
}

json run_fit_kernel(const IoOptions& io, const std::string& response,
                    const std::string& covariate, int boot) {
  rng::RngStream rng(io.seed);
  data::Dataset data = data::read_csv(io.input, response, io.status_column, io.tag);
  if (!covariate.empty()) {
    data::Dataset filtered;
    filtered.y = data.y;
    filtered.status = data.status;
    filtered.covariates[covariate] = data.covariate(covariate);
    data = std::move(filtered);
  }
  const Eigen::VectorXd grid = stats::linspace(0.0, 1.0, io.grid_points);
  const kernel::KernelArocResult res = kernel::kernel_aroc(data, grid, boot, io.level, rng);
  if (!io.curve_csv.empty())
    data::write_curve_csv(io.curve_csv, res.curve.grid, res.curve.mean, res.curve.lower,
                          res.curve.upper);
  return {{"curve", curve_json(res.curve)},
          {"aauc", scalar_json(res.aauc)},
          {"bandwidth_mean", res.h_mean},
          {"bandwidth_variance", res.h_var},
          {"variance_floor_hits", res.floor_hits},
          {"kernel_underflow_fallbacks", res.nw_fallbacks},
          {"n_nondiseased", data.count(0)},
          {"n_diseased", data.count(1)}};
}

json run_pooled(const IoOptions& io, const std::string& response, int boot) {
  rng::RngStream rng(io.seed);
  const data::Dataset data = data::read_csv(io.input, response, io.status_column, io.tag);
  const data::Dataset d0 = data.subset(0), d1 = data.subset(1);
  const Eigen::VectorXd grid = stats::linspace(0.0, 1.0, io.grid_points);
  const curves::PooledResult bb = curves::pooled_roc_bb(d0.y, d1.y, grid, boot, io.level, rng);
  const Eigen::VectorXd empirical = curves::pooled_roc_empirical(d0.y, d1.y, grid);
  if (!io.curve_csv.empty())
    data::write_curve_csv(io.curve_csv, bb.curve.grid, bb.curve.mean, bb.curve.lower,
                          bb.curve.upper);
  json emp = json::array();
  for (Eigen::Index i = 0; i < empirical.size(); ++i) emp.push_back(empirical[i]);
  return {{"curve", curve_json(bb.curve)},
          {"auc", scalar_json(bb.auc)},
          {"empirical", emp},
          {"n_nondiseased", data.count(0)},
          {"n_diseased", data.count(1)},
          {"bootstrap_draws", boot}};
}

json run_thresholds(const IoOptions& io, const FitOptions& opts, std::vector<double> fpfs,
                    int cov_grid) {
  if (fpfs.empty()) throw DataError("thresholds: need at least one --fpf value");
  for (double t : fpfs)
    if (!(t > 0.0 && t < 1.0)) throw DataError("thresholds: each FPF must lie in (0, 1)");
  if (cov_grid < 2) throw DataError("thresholds: --cov-grid must be at least 2");

  rng::RngStream rng(io.seed);
  FittedData fitted = fit_from_csv(io, opts, rng);

  // the threshold curve runs over one continuous covariate, optionally split
  // by one binary factor
  std::string continuous, factor;
  auto note_continuous = [&](const std::string& name) {
    if (continuous.empty()) continuous = name;
    else if (continuous != name)
      throw DataError("thresholds: the formula must use a single continuous covariate");
  };
  auto note_factor = [&](const std::string& name) {
    if (factor.empty()) factor = name;
    else if (factor != name)
      throw DataError("thresholds: the formula must use at most one factor");
  };
  for (const auto& term : fitted.parsed.spec.terms) {
    std::visit(
        [&](const auto& t) {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, splines::LinearTerm>) note_continuous(t.name);
          if constexpr (std::is_same_v<T, splines::SmoothTerm>) note_continuous(t.name);
          if constexpr (std::is_same_v<T, splines::FactorTerm>) note_factor(t.name);
          if constexpr (std::is_same_v<T, splines::FactorSmoothTerm>) {
            note_continuous(t.name);
            note_factor(t.by);
          }
        },
        term);
  }
  if (continuous.empty()) throw DataError("thresholds: the formula names no continuous covariate");

  const data::Dataset nondiseased = fitted.data.subset(0);
  const auto& xs = nondiseased.covariate(continuous);
  const double xmin = *std::min_element(xs.begin(), xs.end());
  const double xmax = *std::max_element(xs.begin(), xs.end());
  const Eigen::VectorXd xgrid = stats::linspace(xmin, xmax, cov_grid);
  const std::vector<double> levels = factor.empty() ? std::vector<double>{0.0}
                                                    : std::vector<double>{0.0, 1.0};

  json curves_out = json::array();
  std::ofstream csv;
  if (!io.curve_csv.empty()) {
    csv.open(io.curve_csv);
    if (!csv) throw DataError("cannot write '" + io.curve_csv + "'");
    csv.precision(17);
    csv << "fpf," << (factor.empty() ? std::string("x") : factor + ",x")
        << ",mean,lower,upper\n";
  }
  for (double fpf : fpfs) {
    for (double lvl : levels) {
      json x = json::array(), mean = json::array(), lower = json::array(), upper = json::array();
      for (Eigen::Index i = 0; i < xgrid.size(); ++i) {
        const double xv = xgrid[i];
        const Eigen::VectorXd zrow = fitted.fit.design.row([&](const std::string& name) {
          if (name == continuous) return xv;
          if (!factor.empty() && name == factor) return lvl;
          throw DataError("thresholds: formula uses covariate '" + name +
                          "' beyond the threshold grid");
        });
        const curves::ScalarEstimate c =
            curves::covariate_threshold(fitted.fit, zrow, fpf, io.level);
        x.push_back(xv);
        mean.push_back(c.mean);
        lower.push_back(c.lower);
        upper.push_back(c.upper);
        if (csv.is_open()) {
          csv << fpf << ',';
          if (!factor.empty()) csv << lvl << ',';
          csv << xv << ',' << c.mean << ',' << c.lower << ',' << c.upper << '\n';
        }
      }
      json entry = {{"fpf", fpf}, {"x", x}, {"mean", mean}, {"lower", lower}, {"upper", upper}};
      if (!factor.empty()) entry["level"] = lvl;
      curves_out.push_back(std::move(entry));
    }
  }
  json out = {{"covariate", continuous},
              {"curves", curves_out},
              {"n_nondiseased", fitted.data.count(0)}};
  if (!factor.empty()) out["factor"] = factor;
  return out;
}

json run_ppc(const IoOptions& io, const FitOptions& opts, const std::string& samples_csv) {
  rng::RngStream rng(io.seed);
  FittedData fitted = fit_from_csv(io, opts, rng);
  const modelcrit::PredictiveChecks checks =
      modelcrit::posterior_predictive_stats(fitted.fit, rng);
  if (!samples_csv.empty()) {
    std::ofstream out(samples_csv);
    if (!out) throw DataError("cannot write '" + samples_csv + "'");
    out.precision(17);
    out << "draw,skewness,kurtosis\n";
    for (std::size_t s = 0; s < checks.replicate_skewness.size(); ++s)
      out << s << ',' << checks.replicate_skewness[s] << ',' << checks.replicate_kurtosis[s]
          << '\n';
  }
  return {{"observed_skewness", checks.observed_skewness},
          {"observed_kurtosis", checks.observed_kurtosis},
          {"pvalue_skewness", checks.pvalue_skewness},
          {"pvalue_kurtosis", checks.pvalue_kurtosis},
          {"replicates", checks.replicate_skewness.size()},
          {"n_nondiseased", fitted.data.count(0)}};
}

struct SimulateOptions {
  std::string scenario = "I";
  std::string estimator = "bnp";
  std::vector<int> sizes = {200, 200};
  simlab::StudyConfig config;
  bool paper = false;
  std::uint64_t seed = 1;
  std::string out;
  std::string replicates_csv;
};

json run_simulate(SimulateOptions& sim) {
  sim.config.scenario = simlab::parse_scenario(sim.scenario);
  sim.config.estimator = simlab::parse_estimator(sim.estimator);
  if (sim.sizes.size() != 2) throw DataError("simulate: --sizes takes two values");
  sim.config.n_nondiseased = sim.sizes[0];
  sim.config.n_diseased = sim.sizes[1];
  if (sim.paper) sim.config = simlab::paper_scale(sim.config);
  rng::RngStream rng(sim.seed);
  const simlab::StudyReport report = simlab::coverage_study(sim.config, rng);
  if (!sim.replicates_csv.empty()) simlab::write_study_csv(sim.replicates_csv, report);
  return json::parse(simlab::study_json_text(report));
}

void write_diagnostic(const std::string& out, const std::string& command, const std::string& type,
                      const std::string& message) {
  std::cerr << "error (" << type << "): " << message << '\n';
  if (out.empty()) return;
  json j = {{"format_version", 1},
            {"command", command},
            {"error", {{"type", type}, {"message", message}}}};
  try {
    write_text(out, j.dump(2));
  } catch (const std::exception&) {
    // the diagnostic is best-effort; the exit code carries the verdict
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Covariate-adjusted ROC analysis"};
  app.require_subcommand(1);

  // fit-bnp / fit-bsp
  IoOptions bnp_io, bsp_io;
  FitOptions bnp_fit, bsp_fit;
  std::vector<double> bnp_paauc, bsp_paauc;
  CLI::App* bnp = app.add_subcommand(
      "fit-bnp", "B-splines dependent Dirichlet process fit of the adjusted ROC curve");
  add_io_options(bnp, bnp_io);
  add_fit_options(bnp, bnp_fit);
  bnp->add_option("--paauc", bnp_paauc, "partial-area endpoints t0 (repeatable)");

  CLI::App* bsp = app.add_subcommand(
      "fit-bsp", "single-component (Bayesian normal) fit of the adjusted ROC curve");
  add_io_options(bsp, bsp_io);
  add_fit_options(bsp, bsp_fit, /*with_components=*/false);
  bsp_fit.components = 1;
  bsp->add_option("--paauc", bsp_paauc, "partial-area endpoints t0 (repeatable)");

  // fit-kernel
  IoOptions kern_io;
  std::string kern_covariate;
  std::string kern_response = "y";
  int kern_boot = 1000;
  CLI::App* kern = app.add_subcommand("fit-kernel",
                                      "kernel location-scale fit with bootstrap bands");
  add_io_options(kern, kern_io);
  kern->add_option("--response", kern_response, "response column name")->capture_default_str();
  kern->add_option("--covariate", kern_covariate,
                   "covariate column (default: the input's single covariate)");
  kern->add_option("--boot", kern_boot, "bootstrap replicates")->capture_default_str();

  // pooled
  IoOptions pool_io;
  std::string pool_response = "y";
  int pool_boot = 1000;
  CLI::App* pool = app.add_subcommand("pooled", "covariate-free pooled ROC curve");
  add_io_options(pool, pool_io);
  pool->add_option("--response", pool_response, "response column name")->capture_default_str();
  pool->add_option("--boot", pool_boot, "Bayesian-bootstrap draws")->capture_default_str();

  // thresholds
  IoOptions thr_io;
  FitOptions thr_fit;
  std::vector<double> thr_fpfs;
  int thr_cov_grid = 51;
  CLI::App* thr = app.add_subcommand(
      "thresholds", "covariate-specific decision thresholds at fixed false positive fractions");
  add_io_options(thr, thr_io);
  add_fit_options(thr, thr_fit);
  thr->add_option("--fpf", thr_fpfs, "false positive fractions (repeatable; default 0.1 0.3)");
  thr->add_option("--cov-grid", thr_cov_grid, "covariate grid resolution")->capture_default_str();

  // ppc
  IoOptions ppc_io;
  FitOptions ppc_fit;
  std::string ppc_samples;
  CLI::App* ppc = app.add_subcommand(
      "ppc", "posterior predictive skewness/kurtosis checks of the nondiseased fit");
  add_io_options(ppc, ppc_io, /*with_curve_csv=*/false);
  add_fit_options(ppc, ppc_fit);
  ppc->add_option("--samples-csv", ppc_samples, "write per-draw replicate statistics as CSV");

  // simulate
  SimulateOptions sim;
  CLI::App* simc = app.add_subcommand("simulate", "synthetic-scenario coverage study");
  simc->add_option("--scenario", sim.scenario, "scenario I..VI")->capture_default_str();
  simc->add_option("--estimator", sim.estimator, "bnp, linear, kernel, or pooled")
      ->capture_default_str();
  simc->add_option("--sizes", sim.sizes, "group sizes: nondiseased diseased")
      ->expected(2);
  simc->add_option("--replicates", sim.config.replicates, "Monte Carlo replicates")
      ->capture_default_str();
  simc->add_option("--knots", sim.config.knots, "interior knots per smooth")
      ->capture_default_str();
  simc->add_option("--components", sim.config.components, "mixture truncation level")
      ->capture_default_str();
  simc->add_option("--nsim", sim.config.nsim, "total MCMC iterations")->capture_default_str();
  simc->add_option("--nburn", sim.config.nburn, "burn-in iterations")->capture_default_str();
  simc->add_option("--kernel-boot", sim.config.kernel_boot, "kernel bootstrap replicates")
      ->capture_default_str();
  simc->add_option("--grid-points", sim.config.grid_points, "FPF grid resolution")
      ->capture_default_str();
  simc->add_option("--level", sim.config.level, "band level")->capture_default_str();
  simc->add_option("--threads", sim.config.threads, "worker threads")
      ->envname("AROC_THREADS")
      ->capture_default_str();
  simc->add_flag("--paper-scale", sim.paper,
                 "100 replicates, 8000 retained draws after 2000 burn-in");
  simc->add_option("--seed", sim.seed, "RNG seed")->capture_default_str();
  simc->add_option("--out", sim.out, "output JSON path")->required();
  simc->add_option("--replicates-csv", sim.replicates_csv, "per-replicate CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  struct Command {
    const char* name;
    CLI::App* sub;
    std::string* out;
    std::uint64_t* seed;
    std::function<json()> echo;
    std::function<json()> run;
  };
  const std::vector<Command> commands = {
      {"fit-bnp", bnp, &bnp_io.out, &bnp_io.seed,
       [&] {
         json j = io_echo(bnp_io);
         j.update(fit_echo(bnp_fit));
         j["paauc_t0s"] = bnp_paauc;
         return j;
       },
       [&] { return run_fit_model(bnp_io, bnp_fit, bnp_paauc); }},
      {"fit-bsp", bsp, &bsp_io.out, &bsp_io.seed,
       [&] {
         json j = io_echo(bsp_io);
         j.update(fit_echo(bsp_fit));
         j["paauc_t0s"] = bsp_paauc;
         return j;
       },
       [&] { return run_fit_model(bsp_io, bsp_fit, bsp_paauc); }},
      {"fit-kernel", kern, &kern_io.out, &kern_io.seed,
       [&] {
         json j = io_echo(kern_io);
         j["response"] = kern_response;
         j["covariate"] = kern_covariate;
         j["boot"] = kern_boot;
         return j;
       },
       [&] { return run_fit_kernel(kern_io, kern_response, kern_covariate, kern_boot); }},
      {"pooled", pool, &pool_io.out, &pool_io.seed,
       [&] {
         json j = io_echo(pool_io);
         j["response"] = pool_response;
         j["boot"] = pool_boot;
         return j;
       },
       [&] { return run_pooled(pool_io, pool_response, pool_boot); }},
      {"thresholds", thr, &thr_io.out, &thr_io.seed,
       [&] {
         json j = io_echo(thr_io);
         j.update(fit_echo(thr_fit));
         j["fpfs"] = thr_fpfs.empty() ? std::vector<double>{0.1, 0.3} : thr_fpfs;
         j["cov_grid"] = thr_cov_grid;
         return j;
       },
       [&] {
         return run_thresholds(thr_io, thr_fit,
                               thr_fpfs.empty() ? std::vector<double>{0.1, 0.3} : thr_fpfs,
                               thr_cov_grid);
       }},
      {"ppc", ppc, &ppc_io.out, &ppc_io.seed,
       [&] {
         json j = io_echo(ppc_io);
         j.update(fit_echo(ppc_fit));
         j["samples_csv"] = ppc_samples;
         return j;
       },
       [&] { return run_ppc(ppc_io, ppc_fit, ppc_samples); }},
      {"simulate", simc, &sim.out, &sim.seed,
       [&] {
         return json{{"scenario", sim.scenario},
                     {"estimator", sim.estimator},
                     {"sizes", sim.sizes},
                     {"paper_scale", sim.paper},
                     {"seed", sim.seed},
                     {"threads", sim.config.threads},
                     {"replicates_csv", sim.replicates_csv}};
       },
       [&] { return run_simulate(sim); }},
  };

  for (const auto& cmd : commands) {
    if (!app.got_subcommand(cmd.sub)) continue;
    const auto start = std::chrono::steady_clock::now();
    try {
      json results = cmd.run();
      json doc;
      doc["format_version"] = 1;
      doc["command"] = cmd.name;
      doc["seed"] = *cmd.seed;
      doc["config"] = cmd.echo();
      doc["results"] = std::move(results);
      doc["runtime_seconds"] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      write_text(*cmd.out, doc.dump(2));
      return 0;
    } catch (const DataError& e) {
      write_diagnostic(*cmd.out, cmd.name, "data", e.what());
      return 2;
    } catch (const NumericalError& e) {
      write_diagnostic(*cmd.out, cmd.name, "numerical", e.what());
      return 3;
    } catch (const std::exception& e) {
      write_diagnostic(*cmd.out, cmd.name, "internal", e.what());
      return 3;
    }
  }
  std::cerr << "error: no subcommand given\n";
  return 1;
}
