#include "aroc/ddp.hpp"

#include <cmath>
#include <vector>

#include "aroc/common.hpp"
#include "aroc/stats.hpp"

namespace aroc::ddp {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

Eigen::MatrixXd solve_spd(const Eigen::MatrixXd& a, const Eigen::MatrixXd& rhs,
                          const char* what) {
  const Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success)
    throw NumericalError(std::string(what) + ": matrix not positive definite");
  return llt.solve(rhs);
}

Eigen::MatrixXd inverse_spd(const Eigen::MatrixXd& a, const char* what) {
  return solve_spd(a, Eigen::MatrixXd::Identity(a.rows(), a.cols()), what);
}

void validate_prior(const PriorSpec& prior, Eigen::Index q) {
  if (prior.components < 1) throw DataError("prior: truncation level must be >= 1");
  if (!(prior.alpha > 0.0)) throw DataError("prior: alpha must be positive");
  if (!(prior.a > 0.0) || !(prior.b > 0.0)) throw DataError("prior: a, b must be positive");
  if (prior.m0.size() != q || prior.s0.rows() != q || prior.s0.cols() != q ||
      prior.psi.rows() != q || prior.psi.cols() != q)
    throw DataError("prior: hyperparameter dimensions do not match the design");
  if (prior.nu < static_cast<double>(q))
    throw DataError("prior: Wishart degrees of freedom below design dimension");
}

}  // namespace

PriorSpec default_prior(int q, int components) {
  if (q < 1) throw DataError("default_prior: design dimension must be >= 1");
  PriorSpec p;
  p.m0 = Eigen::VectorXd::Zero(q);
  p.s0 = 100.0 * Eigen::MatrixXd::Identity(q, q);
  p.nu = q + 2;
  p.psi = Eigen::MatrixXd::Identity(q, q);
  p.a = 2.0;
  p.b = 0.5;
  p.alpha = 1.0;
  p.components = components;
  return p;
}

double truncation_bound(double alpha, int components) {
  if (!(alpha > 0.0) || components < 1)
    throw DataError("truncation_bound: need alpha > 0 and components >= 1");
  return std::pow(alpha / (alpha + 1.0), components);
}

double prior_expected_clusters(double alpha, std::size_t n) {
  if (!(alpha > 0.0)) throw DataError("prior_expected_clusters: alpha must be positive");
  double e = 0.0;
  for (std::size_t i = 1; i <= n; ++i) e += alpha / (alpha + static_cast<double>(i) - 1.0);
  return e;
}

Eigen::VectorXd stick_weights(const Eigen::VectorXd& v) {
  const Eigen::Index L = v.size();
  Eigen::VectorXd w(L);
  double remaining = 1.0;
  for (Eigen::Index l = 0; l < L; ++l) {
    w[l] = v[l] * remaining;
    remaining *= 1.0 - v[l];
  }
  return w;
}

std::vector<int> allocation_counts(const std::vector<int>& alloc, int components) {
  std::vector<int> counts(components, 0);
  for (int s : alloc) {
    if (s < 0 || s >= components) throw NumericalError("allocation index out of range");
    ++counts[s];
  }
  return counts;
}

std::pair<double, double> stick_beta_params(const std::vector<int>& counts, double alpha, int l) {
  int tail = 0;
  for (std::size_t r = static_cast<std::size_t>(l) + 1; r < counts.size(); ++r) tail += counts[r];
  return {counts[l] + 1.0, alpha + tail};
}

GaussianConditional beta_full_conditional(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                                          const std::vector<int>& alloc, int l, double sigma2,
                                          const Eigen::VectorXd& m, const Eigen::MatrixXd& s_inv) {
  const Eigen::Index q = z.cols();
  Eigen::MatrixXd zz = Eigen::MatrixXd::Zero(q, q);
  Eigen::VectorXd zy = Eigen::VectorXd::Zero(q);
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    if (alloc[static_cast<std::size_t>(i)] != l) continue;
    zz.noalias() += z.row(i).transpose() * z.row(i);
    zy.noalias() += z.row(i).transpose() * y[i];
  }
  const double prec = 1.0 / sigma2;
  GaussianConditional out;
  out.cov = inverse_spd(s_inv + prec * zz, "beta full conditional");
  out.mean = out.cov * (s_inv * m + prec * zy);
  return out;
}

std::pair<double, double> sigma2_gamma_params(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                                              const std::vector<int>& alloc, int l,
                                              const Eigen::VectorXd& beta_l, double a, double b) {
  double rss = 0.0;
  int n_l = 0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    if (alloc[static_cast<std::size_t>(i)] != l) continue;
    const double r = y[i] - z.row(i).dot(beta_l);
    rss += r * r;
    ++n_l;
  }
  return {a + 0.5 * n_l, b + 0.5 * rss};
}

GaussianConditional hyper_mean_full_conditional(const Eigen::MatrixXd& beta,
                                                const Eigen::MatrixXd& s_inv,
                                                const Eigen::VectorXd& m0,
                                                const Eigen::MatrixXd& s0) {
  const double L = static_cast<double>(beta.rows());
  const Eigen::MatrixXd s0_inv = inverse_spd(s0, "hyper mean conditional");
  GaussianConditional out;
  out.cov = inverse_spd(s0_inv + L * s_inv, "hyper mean conditional");
  out.mean = out.cov * (s0_inv * m0 + s_inv * beta.colwise().sum().transpose());
  return out;
}

WishartParams hyper_prec_wishart_params(const Eigen::MatrixXd& beta, const Eigen::VectorXd& m,
                                        double nu, const Eigen::MatrixXd& psi) {
  WishartParams out;
  out.df = nu + static_cast<double>(beta.rows());
  out.inv_scale = nu * psi;
  for (Eigen::Index l = 0; l < beta.rows(); ++l) {
    const Eigen::VectorXd dev = beta.row(l).transpose() - m;
    out.inv_scale.noalias() += dev * dev.transpose();
  }
  return out;
}

void update_allocations(GibbsState& state, const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                        rng::RngStream& rng) {
  const Eigen::Index n = z.rows();
  const Eigen::Index L = state.w.size();
  const Eigen::MatrixXd means = z * state.beta.transpose();  // n x L

  Eigen::VectorXd logw(L), inv2s(L), lognorm(L);
  for (Eigen::Index l = 0; l < L; ++l) {
    logw[l] = state.w[l] > 0.0 ? std::log(state.w[l])
                               : -std::numeric_limits<double>::infinity();
    inv2s[l] = 0.5 / state.sigma2[l];
    lognorm[l] = -0.5 * (kLog2Pi + std::log(state.sigma2[l]));
  }

  Eigen::VectorXd logp(L), p(L);
  for (Eigen::Index i = 0; i < n; ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index l = 0; l < L; ++l) {
      const double r = y[i] - means(i, l);
      logp[l] = logw[l] + lognorm[l] - r * r * inv2s[l];
      if (logp[l] > best) best = logp[l];
    }
    if (!std::isfinite(best))
      throw NumericalError("allocation update: no component has positive posterior weight");
    for (Eigen::Index l = 0; l < L; ++l) p[l] = std::exp(logp[l] - best);
    state.alloc[static_cast<std::size_t>(i)] = rng.categorical(p);
  }
}

void update_stick_weights(GibbsState& state, double alpha, rng::RngStream& rng) {
  const Eigen::Index L = state.v.size();
  const std::vector<int> counts = allocation_counts(state.alloc, static_cast<int>(L));
  for (Eigen::Index l = 0; l + 1 < L; ++l) {
    const auto [pa, pb] = stick_beta_params(counts, alpha, static_cast<int>(l));
    state.v[l] = rng.beta(pa, pb);
  }
  state.v[L - 1] = 1.0;
  state.w = stick_weights(state.v);
}

void update_components(GibbsState& state, const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                       const PriorSpec& prior, double fix_sigma2, rng::RngStream& rng) {
  const Eigen::Index L = state.beta.rows();
  const std::vector<int> counts = allocation_counts(state.alloc, static_cast<int>(L));
  const Eigen::MatrixXd base_cov = inverse_spd(state.s_inv, "component update");

  for (Eigen::Index l = 0; l < L; ++l) {
    if (counts[static_cast<std::size_t>(l)] == 0) {
      // Empty component: refresh from the base measure.
      state.beta.row(l) = rng.mvnormal(state.m, base_cov).transpose();
      if (fix_sigma2 > 0.0)
        state.sigma2[l] = fix_sigma2;
      else
        state.sigma2[l] = 1.0 / rng.gamma(prior.a, prior.b);
      continue;
    }
    const GaussianConditional bc = beta_full_conditional(
        z, y, state.alloc, static_cast<int>(l), state.sigma2[l], state.m, state.s_inv);
    state.beta.row(l) = rng.mvnormal(bc.mean, bc.cov).transpose();
    if (fix_sigma2 > 0.0) {
      state.sigma2[l] = fix_sigma2;
    } else {
      const auto [shape, rate] = sigma2_gamma_params(
          z, y, state.alloc, static_cast<int>(l), state.beta.row(l).transpose(), prior.a, prior.b);
      state.sigma2[l] = 1.0 / rng.gamma(shape, rate);
    }
  }
}

void update_hyperparams(GibbsState& state, const PriorSpec& prior, rng::RngStream& rng) {
  const GaussianConditional mc =
      hyper_mean_full_conditional(state.beta, state.s_inv, prior.m0, prior.s0);
  state.m = rng.mvnormal(mc.mean, mc.cov);
  const WishartParams wp = hyper_prec_wishart_params(state.beta, state.m, prior.nu, prior.psi);
  state.s_inv = rng.wishart(wp.df, wp.inv_scale);
}

FitResult gibbs_fit(splines::ModelDesign design, Eigen::MatrixXd z, Eigen::VectorXd y,
                    const PriorSpec& prior, const GibbsConfig& config, rng::RngStream& rng) {
  const Eigen::Index n = y.size();
  const Eigen::Index q = z.cols();
  if (n < 2) throw DataError("gibbs_fit: need at least two observations");
  if (z.rows() != n) throw DataError("gibbs_fit: design/response size mismatch");
  if (q != design.q) throw DataError("gibbs_fit: design matrix does not match the model");
  validate_prior(prior, q);
  if (config.nburn < 0 || config.nsim <= config.nburn)
    throw DataError("gibbs_fit: need 0 <= nburn < nsim");
  const int L = prior.components;

  FitResult fit;
  fit.design = std::move(design);
  fit.prior = prior;
  fit.config = config;
  fit.z = std::move(z);
  fit.y = std::move(y);

  double scale = 1.0;
  if (config.scale_response) {
    scale = stats::sd(stats::to_vector(fit.y));
    if (!std::isfinite(scale) || scale <= 0.0)
      throw DataError("gibbs_fit: response is constant; cannot standardize");
  }
  fit.response_scale = scale;
  const Eigen::VectorXd ys = fit.y / scale;
  const double fix_sigma2 =
      config.fix_sigma2 > 0.0 ? config.fix_sigma2 / (scale * scale) : 0.0;

  // --- initial state ---
  GibbsState st;
  if (config.init_m) {
    if (config.init_m->size() != q) throw DataError("gibbs_fit: init_m has wrong dimension");
    st.m = *config.init_m;
  } else {
    st.m = rng.mvnormal(prior.m0, prior.s0);
  }
  if (config.init_s_inv) {
    if (config.init_s_inv->rows() != q || config.init_s_inv->cols() != q)
      throw DataError("gibbs_fit: init_s_inv has wrong dimension");
    st.s_inv = *config.init_s_inv;
  } else {
    st.s_inv = rng.wishart(prior.nu, prior.nu * prior.psi);
  }
  const Eigen::MatrixXd init_cov = inverse_spd(st.s_inv, "gibbs_fit init");
  st.beta.resize(L, q);
  st.sigma2.resize(L);
  for (int l = 0; l < L; ++l) {
    st.beta.row(l) = rng.mvnormal(st.m, init_cov).transpose();
    st.sigma2[l] = fix_sigma2 > 0.0 ? fix_sigma2 : 1.0 / rng.gamma(prior.a, prior.b);
  }
  st.v.resize(L);
  for (int l = 0; l + 1 < L; ++l) st.v[l] = rng.beta(1.0, prior.alpha);
  st.v[L - 1] = 1.0;
  st.w = stick_weights(st.v);
  st.alloc.resize(static_cast<std::size_t>(n));
  for (auto& s : st.alloc)
    s = std::min(L - 1, static_cast<int>(rng.uniform01() * L));

  // --- sweeps ---
  fit.draws.reserve(static_cast<std::size_t>(config.nsim - config.nburn));
  fit.occupied.reserve(fit.draws.capacity());
  for (int t = 0; t < config.nsim; ++t) {
    update_allocations(st, fit.z, ys, rng);
    update_stick_weights(st, prior.alpha, rng);
    update_components(st, fit.z, ys, prior, fix_sigma2, rng);
    if (config.update_hyper) update_hyperparams(st, prior, rng);

    if (t < config.nburn) continue;
    PosteriorDraw d;
    d.w = st.w;
    d.beta = scale * st.beta;
    d.sigma2 = scale * scale * st.sigma2;
    d.m = scale * st.m;
    d.s_inv = st.s_inv / (scale * scale);
    fit.draws.push_back(std::move(d));

    const std::vector<int> counts = allocation_counts(st.alloc, L);
    int occ = 0;
    for (int c : counts) occ += (c > 0);
    fit.occupied.push_back(occ);
  }
  return fit;
}

FitResult gibbs_fit(const data::Dataset& fit_data, const splines::ModelSpec& spec,
                    const PriorSpec& prior, const GibbsConfig& config, rng::RngStream& rng) {
  fit_data.validate();
  splines::ModelDesign design = splines::build_design(spec, fit_data.column_lookup());
  const Eigen::Index n = static_cast<Eigen::Index>(fit_data.size());
  Eigen::MatrixXd z(n, design.q);
  for (Eigen::Index i = 0; i < n; ++i)
    z.row(i) = design.row(fit_data.row_lookup(static_cast<std::size_t>(i))).transpose();
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(fit_data.y.data(), n);
  return gibbs_fit(std::move(design), std::move(z), std::move(y), prior, config, rng);
}

double cond_cdf(const PosteriorDraw& draw, const Eigen::VectorXd& zrow, double y) {
  double cdf = 0.0;
  for (Eigen::Index l = 0; l < draw.w.size(); ++l) {
    if (draw.w[l] <= 0.0) continue;
    const double mu = zrow.dot(draw.beta.row(l));
    cdf += draw.w[l] * rng::std_normal_cdf((y - mu) / std::sqrt(draw.sigma2[l]));
  }
  return cdf;
}

double cond_logpdf(const PosteriorDraw& draw, const Eigen::VectorXd& zrow, double y) {
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(draw.w.size()));
  for (Eigen::Index l = 0; l < draw.w.size(); ++l) {
    if (draw.w[l] <= 0.0) continue;
    const double sd = std::sqrt(draw.sigma2[l]);
    const double mu = zrow.dot(draw.beta.row(l));
    terms.push_back(std::log(draw.w[l]) + rng::std_normal_logpdf((y - mu) / sd) - std::log(sd));
  }
  if (terms.empty()) throw NumericalError("cond_logpdf: no component has positive weight");
  return stats::logsumexp(terms);
}

double cond_sample(const PosteriorDraw& draw, const Eigen::VectorXd& zrow, rng::RngStream& rng) {
  const int l = rng.categorical(draw.w);
  const double mu = zrow.dot(draw.beta.row(l));
  return rng.normal(mu, std::sqrt(draw.sigma2[l]));
}

}  // namespace aroc::ddp
