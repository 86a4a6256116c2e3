#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hemobnn/trainer.hpp"

namespace hemobnn {

// Monte-Carlo posterior predictive for one input.
//   p_mean        = mean_s p_s
//   aleatoric_var = mean_s p_s (1 - p_s)     (likelihood noise)
//   epistemic_var = mean_s (p_s - p_mean)^2  (weight uncertainty)
// total_var = epistemic_var + aleatoric_var = p_mean (1 - p_mean).
struct Prediction {
  double p_mean = 0.0;
  int label = 0;
  double epistemic_var = 0.0;
  double aleatoric_var = 0.0;
  double total_var = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;

  bool operator==(const Prediction&) const = default;
};

inline constexpr double kDefaultThreshold = 0.5;

// x must already be standardized with the model's scaling. Label is
// p_mean >= threshold (ties go to label 1).
Prediction posterior_predictive(const TrainedModel& model, std::span<const double> x,
                                std::size_t n_samples, std::uint64_t seed,
                                double threshold = kDefaultThreshold);

// Seed used for item `index` of a batch classified with `seed`.
std::uint64_t item_seed(std::uint64_t seed, std::size_t index);

// Item i uses item_seed(seed, i), keyed by position in `xs`. `xs.scaling`
// must equal the model's scaling (use prepare_inputs for raw features).
std::vector<Prediction> classify_batch(const TrainedModel& model, const FeatureSet& xs,
                                       std::size_t n_samples, std::uint64_t seed,
                                       double threshold = kDefaultThreshold);

// Applies the model's stored scaling to raw features (identity when the model
// was trained without scaling). Checks layout compatibility.
FeatureSet prepare_inputs(const TrainedModel& model, const FeatureSet& raw);

struct WeightTrace {
  std::size_t weight_index = 0;
  std::uint64_t seed = 0;
  std::vector<double> samples;
};

// n_samples draws of one coordinate from q.
WeightTrace weight_trace(const TrainedModel& model, std::size_t weight_index,
                         std::size_t n_samples, std::uint64_t seed);

}  // namespace hemobnn
