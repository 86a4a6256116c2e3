#include "hemobnn/vi.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hemobnn/errors.hpp"

namespace hemobnn {
namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * log(2 pi)

void check_sizes(const VariationalParams& params, std::size_t n) {
  if (params.mu.size() != n || params.rho.size() != n)
    fail(ErrorCode::kDimensionMismatch, "variational parameters have length " +
                                            std::to_string(params.mu.size()) + ", expected " +
                                            std::to_string(n));
}

void check_samples(std::size_t n_samples) {
  if (n_samples < 1) fail(ErrorCode::kInvalidArgument, "n_samples must be >= 1");
}

}  // namespace

void Prior::validate() const {
  if (!(std > 0.0) || !std::isfinite(std) || !std::isfinite(mean))
    fail(ErrorCode::kInvalidArgument, "prior std must be positive and finite");
}

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double softplus_inverse(double y) {
  if (!(y > 0.0)) fail(ErrorCode::kInvalidArgument, "softplus_inverse needs y > 0");
  return y > 30.0 ? y + std::log(-std::expm1(-y)) : std::log(std::expm1(y));
}

std::vector<double> VariationalParams::sigma() const {
  std::vector<double> s(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) s[i] = softplus(rho[i]);
  return s;
}

void VariationalParams::validate() const {
  if (mu.size() != rho.size())
    fail(ErrorCode::kDimensionMismatch, "mu and rho lengths differ");
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (!std::isfinite(mu[i]) || !std::isfinite(rho[i]))
      fail(ErrorCode::kNumeric, "non-finite variational parameter at index " + std::to_string(i));
}

VariationalParams init_params(std::size_t n, Rng& rng, double mu_std, double initial_sigma) {
  VariationalParams p;
  p.mu.resize(n);
  for (double& m : p.mu) m = mu_std * rng.normal();
  p.rho.assign(n, softplus_inverse(initial_sigma));
  return p;
}

WeightDraw weights_from_noise(const VariationalParams& params, std::span<const double> eps) {
  check_sizes(params, eps.size());
  WeightDraw d;
  d.eps.assign(eps.begin(), eps.end());
  d.w.resize(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i)
    d.w[i] = params.mu[i] + softplus(params.rho[i]) * eps[i];
  return d;
}

WeightDraw sample_weights(const VariationalParams& params, Rng& rng) {
  std::vector<double> eps(params.size());
  rng.fill_normal(eps);
  return weights_from_noise(params, eps);
}

double log_q(const VariationalParams& params, const WeightDraw& draw) {
  check_sizes(params, draw.w.size());
  double total = 0.0;
  for (std::size_t i = 0; i < draw.w.size(); ++i) {
    const double s = softplus(params.rho[i]);
    const double z = (draw.w[i] - params.mu[i]) / s;
    total += -0.5 * z * z - std::log(s) - kHalfLog2Pi;
  }
  return total;
}

double log_prior(const Prior& prior, std::span<const double> w) {
  prior.validate();
  const double log_std = std::log(prior.std);
  double total = 0.0;
  for (double x : w) {
    const double z = (x - prior.mean) / prior.std;
    total += -0.5 * z * z - log_std - kHalfLog2Pi;
  }
  return total;
}

double kl_diag_gaussians(const VariationalParams& params, const Prior& prior) {
  prior.validate();
  check_sizes(params, params.mu.size());
  const double var_p = prior.std * prior.std;
  double total = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double s = softplus(params.rho[i]);
    const double d = params.mu[i] - prior.mean;
    total += std::log(prior.std / s) + (s * s + d * d) / (2.0 * var_p) - 0.5;
  }
  return total;
}

double NetworkLikelihood::log_likelihood(std::span<const double> w) const {
  return scale_ * hemobnn::log_likelihood(arch_, w, data_);
}

double NetworkLikelihood::log_likelihood_with_gradient(std::span<const double> w,
                                                       std::span<double> grad) const {
  const double v = hemobnn::log_likelihood_with_gradient(arch_, w, data_, grad);
  if (scale_ != 1.0)
    for (double& g : grad) g *= scale_;
  return scale_ * v;
}

std::string_view elbo_mode_name(ElboMode mode) {
  return mode == ElboMode::kMonteCarlo ? "mc" : "analytic_kl";
}

ElboMode parse_elbo_mode(std::string_view name) {
  if (name == "mc") return ElboMode::kMonteCarlo;
  if (name == "analytic_kl") return ElboMode::kAnalyticKl;
  fail(ErrorCode::kInvalidArgument, "unknown ELBO mode '" + std::string(name) + "'");
}

double elbo_integrand(const VariationalParams& params, const Prior& prior,
                      const LikelihoodModel& model, std::span<const double> eps, ElboMode mode) {
  check_sizes(params, model.n_weights());
  const WeightDraw draw = weights_from_noise(params, eps);
  const double ll = model.log_likelihood(draw.w);
  if (mode == ElboMode::kAnalyticKl) return ll - kl_diag_gaussians(params, prior);
  return log_prior(prior, draw.w) + ll - log_q(params, draw);
}

ElboGradient elbo_integrand_gradient(const VariationalParams& params, const Prior& prior,
                                     const LikelihoodModel& model, std::span<const double> eps,
                                     ElboMode mode) {
  prior.validate();
  const std::size_t n = model.n_weights();
  check_sizes(params, n);
  const WeightDraw draw = weights_from_noise(params, eps);

  std::vector<double> g(n);
  const double ll = model.log_likelihood_with_gradient(draw.w, g);

  ElboGradient out;
  out.d_mu.resize(n);
  out.d_rho.resize(n);
  const double var_p = prior.std * prior.std;
  if (mode == ElboMode::kMonteCarlo) {
    out.elbo = log_prior(prior, draw.w) + ll - log_q(params, draw);
    for (std::size_t i = 0; i < n; ++i) {
      const double s = softplus(params.rho[i]);
      const double ds = sigmoid(params.rho[i]);
      const double gw = g[i] - (draw.w[i] - prior.mean) / var_p;
      out.d_mu[i] = gw;
      out.d_rho[i] = gw * eps[i] * ds + ds / s;
    }
  } else {
    out.elbo = ll - kl_diag_gaussians(params, prior);
    for (std::size_t i = 0; i < n; ++i) {
      const double s = softplus(params.rho[i]);
      const double ds = sigmoid(params.rho[i]);
      out.d_mu[i] = g[i] - (params.mu[i] - prior.mean) / var_p;
      out.d_rho[i] = g[i] * eps[i] * ds + (1.0 / s - s / var_p) * ds;
    }
  }
  return out;
}

double elbo_estimate(const VariationalParams& params, const Prior& prior,
                     const LikelihoodModel& model, std::size_t n_samples, ElboMode mode, Rng& rng) {
  check_samples(n_samples);
  check_sizes(params, model.n_weights());
  std::vector<double> eps(params.size());
  double total = 0.0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    rng.fill_normal(eps);
    total += elbo_integrand(params, prior, model, eps, mode);
  }
  return total / static_cast<double>(n_samples);
}

double elbo_estimate(const VariationalParams& params, const Prior& prior,
                     const Architecture& arch, const FeatureSet& data, std::size_t n_samples,
                     ElboMode mode, Rng& rng) {
  const NetworkLikelihood model(arch, data.vectors);
  return elbo_estimate(params, prior, model, n_samples, mode, rng);
}

ElboGradient elbo_gradients(const VariationalParams& params, const Prior& prior,
                            const LikelihoodModel& model, std::size_t n_samples, ElboMode mode,
                            Rng& rng) {
  check_samples(n_samples);
  check_sizes(params, model.n_weights());
  const std::size_t n = params.size();
  ElboGradient out;
  out.d_mu.assign(n, 0.0);
  out.d_rho.assign(n, 0.0);
  std::vector<double> eps(n);
  for (std::size_t s = 0; s < n_samples; ++s) {
    rng.fill_normal(eps);
    const auto g = elbo_integrand_gradient(params, prior, model, eps, mode);
    for (std::size_t i = 0; i < n; ++i) {
      out.d_mu[i] += g.d_mu[i];
      out.d_rho[i] += g.d_rho[i];
    }
    out.elbo += g.elbo;
  }
  const double inv = 1.0 / static_cast<double>(n_samples);
  for (std::size_t i = 0; i < n; ++i) {
    out.d_mu[i] *= inv;
    out.d_rho[i] *= inv;
  }
  out.elbo *= inv;
  return out;
}

ElboGradient elbo_gradients(const VariationalParams& params, const Prior& prior,
                            const Architecture& arch, const FeatureSet& data,
                            std::size_t n_samples, ElboMode mode, Rng& rng) {
  const NetworkLikelihood model(arch, data.vectors);
  return elbo_gradients(params, prior, model, n_samples, mode, rng);
}

}  // namespace hemobnn
