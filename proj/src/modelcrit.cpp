#include "aroc/modelcrit.hpp"

#include <cmath>

#include "aroc/common.hpp"
#include "aroc/stats.hpp"

namespace aroc::modelcrit {

CriteriaReport criteria_from_logf(const Eigen::MatrixXd& logf) {
  const Eigen::Index s_total = logf.rows();
  const Eigen::Index n = logf.cols();
  if (s_total < 2 || n < 1)
    throw DataError("criteria_from_logf: need at least two draws and one observation");
  const double log_s = std::log(static_cast<double>(s_total));

  CriteriaReport out;
  out.log_cpo.reserve(static_cast<std::size_t>(n));
  std::vector<double> lppd_i(static_cast<std::size_t>(n));
  std::vector<double> p_i(static_cast<std::size_t>(n));
  std::vector<double> column(static_cast<std::size_t>(s_total));
  std::vector<double> neg_column(static_cast<std::size_t>(s_total));

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index s = 0; s < s_total; ++s) {
      const double v = logf(s, i);
      if (!std::isfinite(v))
        throw NumericalError("criteria_from_logf: non-finite log density");
      column[static_cast<std::size_t>(s)] = v;
      neg_column[static_cast<std::size_t>(s)] = -v;
    }
    out.log_cpo.push_back(-(stats::logsumexp(neg_column) - log_s));
    lppd_i[static_cast<std::size_t>(i)] = stats::logsumexp(column) - log_s;
    p_i[static_cast<std::size_t>(i)] = stats::variance(column);
  }

  out.lpml = stats::sum_sorted(out.log_cpo);
  out.lppd = stats::sum_sorted(lppd_i);
  out.p_waic = stats::sum_sorted(p_i);
  out.waic = -2.0 * (out.lppd - out.p_waic);
  return out;
}

CriteriaReport criteria(const ddp::FitResult& fit) {
  const Eigen::Index s_total = static_cast<Eigen::Index>(fit.draws.size());
  const Eigen::Index n = fit.y.size();
  Eigen::MatrixXd logf(s_total, n);
  for (Eigen::Index s = 0; s < s_total; ++s)
    for (Eigen::Index i = 0; i < n; ++i)
      logf(s, i) =
          ddp::cond_logpdf(fit.draws[static_cast<std::size_t>(s)], fit.z.row(i).transpose(),
                           fit.y[i]);
  return criteria_from_logf(logf);
}

PredictiveChecks posterior_predictive_stats(const ddp::FitResult& fit, rng::RngStream& rng) {
  if (fit.draws.empty()) throw DataError("posterior_predictive_stats: fit has no draws");
  const Eigen::Index n = fit.y.size();

  PredictiveChecks out;
  out.observed_skewness = stats::skewness(stats::to_vector(fit.y));
  out.observed_kurtosis = stats::kurtosis(stats::to_vector(fit.y));
  out.replicate_skewness.reserve(fit.draws.size());
  out.replicate_kurtosis.reserve(fit.draws.size());

  std::vector<double> rep(static_cast<std::size_t>(n));
  std::size_t skew_ge = 0, kurt_ge = 0;
  for (const ddp::PosteriorDraw& d : fit.draws) {
    for (Eigen::Index i = 0; i < n; ++i)
      rep[static_cast<std::size_t>(i)] = ddp::cond_sample(d, fit.z.row(i).transpose(), rng);
    const double sk = stats::skewness(rep);
    const double ku = stats::kurtosis(rep);
    out.replicate_skewness.push_back(sk);
    out.replicate_kurtosis.push_back(ku);
    skew_ge += (sk >= out.observed_skewness);
    kurt_ge += (ku >= out.observed_kurtosis);
  }
  const double s_total = static_cast<double>(fit.draws.size());
  out.pvalue_skewness = static_cast<double>(skew_ge) / s_total;
  out.pvalue_kurtosis = static_cast<double>(kurt_ge) / s_total;
  return out;
}

}  // namespace aroc::modelcrit
