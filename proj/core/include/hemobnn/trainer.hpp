#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hemobnn/features.hpp"
#include "hemobnn/network.hpp"
#include "hemobnn/vi.hpp"

namespace hemobnn {

enum class OptimizerKind { kAdam, kSgd };

std::string_view optimizer_name(OptimizerKind kind);
OptimizerKind parse_optimizer(std::string_view name);

struct TrainConfig {
  std::size_t iterations = 5000;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t n_samples = 1;
  ElboMode mode = ElboMode::kMonteCarlo;
  std::uint64_t seed = 0;
  // Convergence: relative change between consecutive `convergence_window`
  // moving averages of the ELBO trace below `convergence_tol`.
  double convergence_tol = 1e-4;
  std::size_t convergence_window = 100;
  bool early_stop = false;
  std::size_t restarts = 1;
  std::size_t batch_size = 0;  // 0 = full batch
  double init_mu_std = 0.1;
  double init_sigma = 0.05;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

struct ElboTrace {
  std::vector<double> elbo;  // one estimate per executed iteration
};

// Everything needed to continue a run exactly where it stopped.
struct OptimizerState {
  std::size_t restart = 0;
  std::size_t step = 0;
  std::vector<double> m_mu, v_mu, m_rho, v_rho;
  std::vector<double> trace;
  std::optional<std::size_t> converged_at;

  bool operator==(const OptimizerState&) const = default;
};

struct TraceSummary {
  std::size_t iterations = 0;
  double first_window_mean = 0.0;  // mean ELBO of the first 10% of iterations
  double last_window_mean = 0.0;   // mean ELBO of the last 10%
  double final_elbo = 0.0;
  std::optional<std::size_t> converged_at;

  bool operator==(const TraceSummary&) const = default;
};

TraceSummary summarize_trace(std::span<const double> trace,
                             std::optional<std::size_t> converged_at = std::nullopt);

struct TrainedModel {
  Architecture arch;
  VariationalParams params;
  Prior prior;
  FeatureLayout layout;
  std::optional<Scaling> scaling;
  TrainConfig config;
  std::string config_hash;
  TraceSummary summary;
  std::optional<OptimizerState> optimizer;

  bool operator==(const TrainedModel&) const = default;
};

struct TrainResult {
  TrainedModel model;
  ElboTrace trace;
  std::vector<std::string> warnings;
};

// Maximizes the ELBO by gradient ascent. Iteration t of restart r draws its
// noise (and minibatch) from derive_seed(seed, {r, t}), so a run resumed from
// its OptimizerState is bit-identical to an uninterrupted one.
TrainResult train(const FeatureSet& train_set, const Architecture& arch, const Prior& prior,
                  const TrainConfig& cfg);

// Continues the run stored in `checkpoint` up to cfg.iterations total steps.
TrainResult resume(const TrainedModel& checkpoint, const FeatureSet& train_set,
                   const TrainConfig& cfg);

// Hook called before each step; may re-point the likelihood (minibatching).
using StepHook = std::function<void(std::size_t iteration, Rng& rng)>;

struct OptimizeResult {
  VariationalParams params;
  OptimizerState state;
};

// Generic ELBO ascent for any likelihood, shared by train() and the
// conjugate-model checks. Starts from `state` when given (resume).
OptimizeResult optimize_elbo(const LikelihoodModel& model, const Prior& prior,
                             VariationalParams params, const TrainConfig& cfg,
                             std::size_t restart, std::optional<OptimizerState> state = std::nullopt,
                             const StepHook& before_step = {});

}  // namespace hemobnn
