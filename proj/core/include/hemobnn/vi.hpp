#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "hemobnn/network.hpp"
#include "hemobnn/rng.hpp"

namespace hemobnn {

// Isotropic Gaussian prior N(mean, std^2) over every weight.
struct Prior {
  double mean = 0.0;
  double std = 1.0;

  void validate() const;
  bool operator==(const Prior&) const = default;
};

// log(1 + exp(x)) without overflow.
double softplus(double x);
// Inverse of softplus for y > 0.
double softplus_inverse(double y);

// Mean-field Gaussian posterior q(w) = prod N(mu_i, softplus(rho_i)^2).
struct VariationalParams {
  std::vector<double> mu;
  std::vector<double> rho;

  std::size_t size() const { return mu.size(); }
  std::vector<double> sigma() const;
  void validate() const;

  bool operator==(const VariationalParams&) const = default;
};

// mu ~ N(0, mu_std^2), sigma = initial_sigma everywhere.
VariationalParams init_params(std::size_t n, Rng& rng, double mu_std = 0.1,
                              double initial_sigma = 0.05);

struct WeightDraw {
  std::vector<double> w;
  std::vector<double> eps;
};

// w = mu + softplus(rho) * eps with eps ~ N(0, I).
WeightDraw sample_weights(const VariationalParams& params, Rng& rng);
// Same map for a caller-supplied eps.
WeightDraw weights_from_noise(const VariationalParams& params, std::span<const double> eps);

double log_q(const VariationalParams& params, const WeightDraw& draw);
double log_prior(const Prior& prior, std::span<const double> w);
// Closed-form KL(q || prior), summed over coordinates.
double kl_diag_gaussians(const VariationalParams& params, const Prior& prior);

// Differentiable log-likelihood log p(D | w) over a flat parameter vector.
class LikelihoodModel {
 public:
  virtual ~LikelihoodModel() = default;
  virtual std::size_t n_weights() const = 0;
  virtual double log_likelihood(std::span<const double> w) const = 0;
  // Returns the value; overwrites `grad` with its gradient.
  virtual double log_likelihood_with_gradient(std::span<const double> w,
                                              std::span<double> grad) const = 0;
};

// Bernoulli likelihood of the network over a batch. `scale` multiplies the
// value and gradient (N / |batch| when a minibatch stands in for N items).
class NetworkLikelihood final : public LikelihoodModel {
 public:
  NetworkLikelihood(const Architecture& arch, std::span<const FeatureVector> data,
                    double scale = 1.0)
      : arch_(arch), data_(data), scale_(scale) {}

  std::size_t n_weights() const override { return arch_.n_weights(); }
  double log_likelihood(std::span<const double> w) const override;
  double log_likelihood_with_gradient(std::span<const double> w,
                                      std::span<double> grad) const override;

 private:
  Architecture arch_;
  std::span<const FeatureVector> data_;
  double scale_;
};

// mc:          log p(w) + log p(D|w) - log q(w), averaged over draws.
// analytic_kl: log p(D|w) averaged over draws, minus the closed-form KL.
enum class ElboMode { kMonteCarlo, kAnalyticKl };

std::string_view elbo_mode_name(ElboMode mode);
ElboMode parse_elbo_mode(std::string_view name);

// Single-draw ELBO integrand for a fixed noise vector.
double elbo_integrand(const VariationalParams& params, const Prior& prior,
                      const LikelihoodModel& model, std::span<const double> eps, ElboMode mode);

struct ElboGradient {
  std::vector<double> d_mu;
  std::vector<double> d_rho;
  double elbo = 0.0;  // the estimate from the same draws
};

// Pathwise gradient of elbo_integrand for a fixed noise vector. With
// g = d(integrand)/dw at w = mu + sigma * eps:
//   d/dmu  = g                             (the log q term has zero total
//                                           derivative in mu)
//   d/drho = g * eps * sigmoid(rho) + direct sigma terms
// where the direct term is sigmoid(rho)/sigma from -log q in mc mode, and
// (1/sigma - sigma/std^2) * sigmoid(rho) from -KL in analytic mode.
ElboGradient elbo_integrand_gradient(const VariationalParams& params, const Prior& prior,
                                     const LikelihoodModel& model, std::span<const double> eps,
                                     ElboMode mode);

// Monte-Carlo ELBO estimate over n_samples draws from rng.
double elbo_estimate(const VariationalParams& params, const Prior& prior,
                     const LikelihoodModel& model, std::size_t n_samples, ElboMode mode, Rng& rng);
double elbo_estimate(const VariationalParams& params, const Prior& prior,
                     const Architecture& arch, const FeatureSet& data, std::size_t n_samples,
                     ElboMode mode, Rng& rng);

// Gradients averaged over n_samples draws; `elbo` is the matching estimate.
ElboGradient elbo_gradients(const VariationalParams& params, const Prior& prior,
                            const LikelihoodModel& model, std::size_t n_samples, ElboMode mode,
                            Rng& rng);
ElboGradient elbo_gradients(const VariationalParams& params, const Prior& prior,
                            const Architecture& arch, const FeatureSet& data,
                            std::size_t n_samples, ElboMode mode, Rng& rng);

}  // namespace hemobnn
