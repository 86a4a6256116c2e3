#include "hemobnn/predict.hpp"

#include <string>

#include "hemobnn/errors.hpp"

namespace hemobnn {
namespace {

constexpr std::uint64_t kItemStream = 0x4954454D;   // "ITEM"
constexpr std::uint64_t kTraceStream = 0x54524345;  // "TRCE"

void check_samples(std::size_t n_samples) {
  if (n_samples < 1) fail(ErrorCode::kInvalidArgument, "number of predictive samples must be >= 1");
}

}  // namespace

Prediction posterior_predictive(const TrainedModel& model, std::span<const double> x,
                                std::size_t n_samples, std::uint64_t seed, double threshold) {
  check_samples(n_samples);
  if (x.size() != model.arch.input_size())
    fail(ErrorCode::kDimensionMismatch, "input has length " + std::to_string(x.size()) +
                                            ", model expects " +
                                            std::to_string(model.arch.input_size()));
  if (model.scaling && model.scaling->size() != x.size())
    fail(ErrorCode::kDimensionMismatch, "model scaling does not match input length");

  Rng rng(seed);
  std::vector<double> probs(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    const WeightDraw draw = sample_weights(model.params, rng);
    probs[s] = forward(model.arch, draw.w, x);
  }
  const double inv = 1.0 / static_cast<double>(n_samples);
  Prediction p;
  p.n_samples = n_samples;
  p.seed = seed;
  for (double v : probs) p.p_mean += v;
  p.p_mean *= inv;
  for (double v : probs) {
    p.aleatoric_var += v * (1.0 - v);
    p.epistemic_var += (v - p.p_mean) * (v - p.p_mean);
  }
  p.aleatoric_var *= inv;
  p.epistemic_var *= inv;
  p.total_var = p.epistemic_var + p.aleatoric_var;
  p.label = p.p_mean >= threshold ? 1 : 0;
  return p;
}

std::uint64_t item_seed(std::uint64_t seed, std::size_t index) {
  return derive_seed(seed, {kItemStream, index});
}

FeatureSet prepare_inputs(const TrainedModel& model, const FeatureSet& raw) {
  if (raw.width() != model.arch.input_size())
    fail(ErrorCode::kDimensionMismatch, "features have width " + std::to_string(raw.width()) +
                                            ", model expects " +
                                            std::to_string(model.arch.input_size()));
  if (raw.scaling) fail(ErrorCode::kInvalidArgument, "features are already standardized");
  if (!model.scaling) return raw;
  return apply_standardizer(raw, *model.scaling);
}

std::vector<Prediction> classify_batch(const TrainedModel& model, const FeatureSet& xs,
                                       std::size_t n_samples, std::uint64_t seed,
                                       double threshold) {
  check_samples(n_samples);
  if (xs.scaling != model.scaling)
    fail(ErrorCode::kDimensionMismatch,
         "feature scaling does not match the model's stored scaling");
  std::vector<Prediction> out;
  out.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    out.push_back(posterior_predictive(model, xs.vectors[i].values, n_samples,
                                       item_seed(seed, i), threshold));
  return out;
}

WeightTrace weight_trace(const TrainedModel& model, std::size_t weight_index,
                         std::size_t n_samples, std::uint64_t seed) {
  check_samples(n_samples);
  if (weight_index >= model.params.size())
    fail(ErrorCode::kInvalidArgument, "weight index " + std::to_string(weight_index) +
                                          " out of range [0, " +
                                          std::to_string(model.params.size()) + ")");
  WeightTrace t;
  t.weight_index = weight_index;
  t.seed = seed;
  t.samples.resize(n_samples);
  const double mu = model.params.mu[weight_index];
  const double sigma = softplus(model.params.rho[weight_index]);
  Rng rng(derive_seed(seed, {kTraceStream, weight_index}));
  for (double& s : t.samples) s = mu + sigma * rng.normal();
  return t;
}

}  // namespace hemobnn
