#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "hemobnn/features.hpp"
#include "hemobnn/rng.hpp"
#include "hemobnn/trainer.hpp"
#include "hemobnn/vi.hpp"

namespace hemobnn::test {

// Two Gaussian blobs in `dim` dimensions, labels alternating 1,0,1,0...
// separated by `shift` along every axis.
inline FeatureSet blobs(std::size_t n, std::size_t dim, double shift, std::uint64_t seed) {
  Rng rng(seed);
  FeatureSet fs;
  fs.layout.windows = {{0.0, 1.0}};
  fs.layout.chromophores = {"x"};
  fs.layout.n_channels = dim;
  for (std::size_t i = 0; i < n; ++i) {
    FeatureVector v;
    v.label = i % 2 == 0 ? 1 : 0;
    for (std::size_t d = 0; d < dim; ++d) v.values.push_back(rng.normal() + (v.label ? shift : -shift) / 2);
    fs.vectors.push_back(std::move(v));
  }
  return fs;
}

// y_i ~ N(w, noise_sd^2) with prior w ~ N(m0, s0^2): the posterior and the
// evidence are Gaussian in closed form.
class ConjugateGaussian final : public LikelihoodModel {
 public:
  ConjugateGaussian(std::vector<double> y, double noise_sd) : y_(std::move(y)), sd_(noise_sd) {}

  std::size_t n_weights() const override { return 1; }
  double log_likelihood(std::span<const double> w) const override {
    double s = 0.0;
    for (double y : y_) s += -0.5 * std::log(2 * std::numbers::pi * sd_ * sd_) - (y - w[0]) * (y - w[0]) / (2 * sd_ * sd_);
    return s;
  }
  double log_likelihood_with_gradient(std::span<const double> w, std::span<double> g) const override {
    g[0] = 0.0;
    for (double y : y_) g[0] += (y - w[0]) / (sd_ * sd_);
    return log_likelihood(w);
  }

  // log p(y) = log N(y; m0 1, sd^2 I + s0^2 11^T).
  double log_evidence(double m0, double s0) const {
    const double n = static_cast<double>(y_.size());
    double sum = 0.0, sumsq = 0.0;
    for (double y : y_) {
      sum += y - m0;
      sumsq += (y - m0) * (y - m0);
    }
    const double a = sd_ * sd_, b = s0 * s0;
    const double logdet = (n - 1) * std::log(a) + std::log(a + n * b);
    const double quad = sumsq / a - b * sum * sum / (a * (a + n * b));
    return -0.5 * (n * std::log(2 * std::numbers::pi) + logdet + quad);
  }

  // Exact ELBO for q = N(mu, s^2), prior N(m0, s0^2).
  double elbo(double mu, double s, double m0, double s0) const {
    double ell = 0.0;
    for (double y : y_)
      ell += -0.5 * std::log(2 * std::numbers::pi * sd_ * sd_) - ((y - mu) * (y - mu) + s * s) / (2 * sd_ * sd_);
    const double kl = std::log(s0 / s) + (s * s + (mu - m0) * (mu - m0)) / (2 * s0 * s0) - 0.5;
    return ell - kl;
  }

  // Posterior mean and standard deviation.
  std::pair<double, double> posterior(double m0, double s0) const {
    const double prec = 1 / (s0 * s0) + static_cast<double>(y_.size()) / (sd_ * sd_);
    double sum = 0.0;
    for (double y : y_) sum += y;
    return {(m0 / (s0 * s0) + sum / (sd_ * sd_)) / prec, 1 / std::sqrt(prec)};
  }

 private:
  std::vector<double> y_;
  double sd_;
};

// Runs optimize_elbo in consecutive stages of `steps` iterations, one per
// learning rate, carrying the optimizer state across stages.
inline OptimizeResult anneal(const LikelihoodModel& model, const Prior& prior, VariationalParams q,
                             TrainConfig cfg, std::size_t steps, std::initializer_list<double> rates) {
  std::optional<OptimizerState> state;
  OptimizeResult r;
  std::size_t total = 0;
  for (double lr : rates) {
    total += steps;
    cfg.iterations = total;
    cfg.learning_rate = lr;
    r = optimize_elbo(model, prior, std::move(q), cfg, 0, std::move(state));
    q = r.params;
    state = r.state;
  }
  return r;
}

// Composite 20-point Gauss-Legendre quadrature on [a, b] split into `panels`.
inline double integrate(const std::function<double(double)>& f, double a, double b, int panels = 400) {
  static const double x[10] = {0.07652652113349734, 0.2277858511416451, 0.37370608871541955, 0.5108670019508271, 0.636053680726515, 0.7463319064601508, 0.8391169718222188, 0.9122344282513258, 0.9639719272779138, 0.9931285991850949};
  static const double w[10] = {0.15275338713072578, 0.14917298647260366, 0.14209610931838187, 0.13168863844917653, 0.11819453196151825, 0.10193011981724026, 0.08327674157670467, 0.06267204833410944, 0.04060142980038622, 0.017614007139153273};
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * h, r = 0.5 * h;
    for (int k = 0; k < 10; ++k) total += w[k] * r * (f(c - r * x[k]) + f(c + r * x[k]));
  }
  return total;
}

inline double normal_pdf(double x, double m, double s) {
  const double z = (x - m) / s;
  return std::exp(-0.5 * z * z) / (s * std::sqrt(2 * std::numbers::pi));
}

// KL(N(m1,s1) || N(m2,s2)) by quadrature of q log(q/p) over m1 +- 12 s1.
inline double kl_quadrature(double m1, double s1, double m2, double s2) {
  auto f = [&](double x) {
    const double z1 = (x - m1) / s1, z2 = (x - m2) / s2;
    const double log_ratio = std::log(s2 / s1) - 0.5 * z1 * z1 + 0.5 * z2 * z2;
    return normal_pdf(x, m1, s1) * log_ratio;
  };
  return integrate(f, m1 - 12 * s1, m1 + 12 * s1);
}

}  // namespace hemobnn::test
