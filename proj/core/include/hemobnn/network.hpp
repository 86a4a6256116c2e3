#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "hemobnn/features.hpp"

namespace hemobnn {

enum class Activation { kTanh, kRelu, kSigmoid };

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view name);

// Version tag of the flat weight layout below; stored in model files.
inline constexpr int kWeightLayoutVersion = 1;

// Fully connected network with a single sigmoid output unit.
//
// Flat weight layout: layer by layer; within layer l (n_in -> n_out) the
// n_out x n_in weight matrix row-major (row = output unit) followed by the
// n_out biases. The default 120-5-5-1 network has 641 parameters.
struct Architecture {
  std::vector<std::size_t> layer_sizes{120, 5, 5, 1};
  Activation hidden_activation = Activation::kTanh;

  std::size_t input_size() const { return layer_sizes.front(); }
  std::size_t n_weights() const;
  // Offset of layer l's weight block in the flat vector.
  std::size_t layer_offset(std::size_t layer) const;
  void validate() const;

  bool operator==(const Architecture&) const = default;
};

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Probability clamp applied inside log-likelihood terms only.
inline constexpr double kProbClamp = 1e-12;

// P(y = 1 | x, w). Unclamped.
double forward(const Architecture& arch, std::span<const double> w, std::span<const double> x);

// Bernoulli log-likelihood sum over the batch; 0 for an empty batch.
double log_likelihood(const Architecture& arch, std::span<const double> w,
                      std::span<const FeatureVector> batch);
double log_likelihood(const Architecture& arch, std::span<const double> w, const FeatureSet& batch);

// Exact gradient of log_likelihood with respect to every weight and bias.
std::vector<double> backprop(const Architecture& arch, std::span<const double> w,
                             std::span<const FeatureVector> batch);
std::vector<double> backprop(const Architecture& arch, std::span<const double> w,
                             const FeatureSet& batch);

// Value and gradient in one pass; gradient is written (not accumulated) into `grad`.
double log_likelihood_with_gradient(const Architecture& arch, std::span<const double> w,
                                    std::span<const FeatureVector> batch, std::span<double> grad);

}  // namespace hemobnn
