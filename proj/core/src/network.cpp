#include "hemobnn/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hemobnn/errors.hpp"

namespace hemobnn {
namespace {

double activate(Activation a, double z) {
  switch (a) {
    case Activation::kTanh: return std::tanh(z);
    case Activation::kRelu: return z > 0.0 ? z : 0.0;
    case Activation::kSigmoid: return sigmoid(z);
  }
  return z;
}

// Derivative expressed through the pre-activation z and output y.
double activate_grad(Activation a, double z, double y) {
  switch (a) {
    case Activation::kTanh: return 1.0 - y * y;
    case Activation::kRelu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::kSigmoid: return y * (1.0 - y);
  }
  return 1.0;
}

void check_dims(const Architecture& arch, std::span<const double> w, std::size_t x_len) {
  if (w.size() != arch.n_weights())
    fail(ErrorCode::kDimensionMismatch, "weight vector has length " + std::to_string(w.size()) +
                                            ", architecture needs " +
                                            std::to_string(arch.n_weights()));
  if (x_len != arch.input_size())
    fail(ErrorCode::kDimensionMismatch, "input has length " + std::to_string(x_len) +
                                            ", architecture expects " +
                                            std::to_string(arch.input_size()));
}

// Per-layer pre-activations and outputs for one item. outputs[0] is the input.
struct Trace {
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> out;
};

double run_forward(const Architecture& arch, std::span<const double> w,
                   std::span<const double> x, Trace& t) {
  const std::size_t n_layers = arch.layer_sizes.size() - 1;
  t.pre.resize(n_layers + 1);
  t.out.resize(n_layers + 1);
  t.out[0].assign(x.begin(), x.end());
  std::size_t offset = 0;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const std::size_t n_in = arch.layer_sizes[l];
    const std::size_t n_out = arch.layer_sizes[l + 1];
    const bool last = l + 1 == n_layers;
    auto& pre = t.pre[l + 1];
    auto& out = t.out[l + 1];
    pre.assign(n_out, 0.0);
    out.assign(n_out, 0.0);
    const auto& in = t.out[l];
    for (std::size_t o = 0; o < n_out; ++o) {
      const double* row = w.data() + offset + o * n_in;
      double z = w[offset + n_out * n_in + o];
      for (std::size_t i = 0; i < n_in; ++i) z += row[i] * in[i];
      pre[o] = z;
      out[o] = last ? sigmoid(z) : activate(arch.hidden_activation, z);
    }
    offset += (n_in + 1) * n_out;
  }
  return t.out[n_layers][0];
}

double item_log_likelihood(double p, int y) {
  const double pc = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
  return y == 1 ? std::log(pc) : std::log(1.0 - pc);
}

}  // namespace

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::kTanh: return "tanh";
    case Activation::kRelu: return "relu";
    case Activation::kSigmoid: return "sigmoid";
  }
  return "tanh";
}

Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  if (name == "sigmoid") return Activation::kSigmoid;
  fail(ErrorCode::kInvalidArgument, "unknown activation '" + std::string(name) + "'");
}

std::size_t Architecture::n_weights() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l)
    n += (layer_sizes[l] + 1) * layer_sizes[l + 1];
  return n;
}

std::size_t Architecture::layer_offset(std::size_t layer) const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < layer; ++l) n += (layer_sizes[l] + 1) * layer_sizes[l + 1];
  return n;
}

void Architecture::validate() const {
  if (layer_sizes.size() < 3)
    fail(ErrorCode::kInvalidArgument, "architecture needs an input, >= 1 hidden and an output layer");
  if (layer_sizes.back() != 1)
    fail(ErrorCode::kInvalidArgument, "output layer must have exactly one unit");
  for (auto s : layer_sizes)
    if (s == 0) fail(ErrorCode::kInvalidArgument, "layer sizes must be positive");
}

double forward(const Architecture& arch, std::span<const double> w, std::span<const double> x) {
  check_dims(arch, w, x.size());
  Trace t;
  return run_forward(arch, w, x, t);
}

double log_likelihood(const Architecture& arch, std::span<const double> w,
                      std::span<const FeatureVector> batch) {
  Trace t;
  double total = 0.0;
  for (const auto& item : batch) {
    check_dims(arch, w, item.values.size());
    total += item_log_likelihood(run_forward(arch, w, item.values, t), item.label);
  }
  return total;
}

double log_likelihood(const Architecture& arch, std::span<const double> w, const FeatureSet& batch) {
  return log_likelihood(arch, w, std::span<const FeatureVector>(batch.vectors));
}

double log_likelihood_with_gradient(const Architecture& arch, std::span<const double> w,
                                    std::span<const FeatureVector> batch, std::span<double> grad) {
  if (grad.size() != arch.n_weights())
    fail(ErrorCode::kDimensionMismatch, "gradient buffer has wrong length");
  std::fill(grad.begin(), grad.end(), 0.0);
  const std::size_t n_layers = arch.layer_sizes.size() - 1;
  Trace t;
  std::vector<double> delta, delta_prev;
  double total = 0.0;
  for (const auto& item : batch) {
    check_dims(arch, w, item.values.size());
    const double p = run_forward(arch, w, item.values, t);
    total += item_log_likelihood(p, item.label);

    // d(term)/dz at the output: y - p inside the clamp, 0 where clamped.
    const bool clamped = p < kProbClamp || p > 1.0 - kProbClamp;
    delta.assign(1, clamped ? 0.0 : static_cast<double>(item.label) - p);

    for (std::size_t l = n_layers; l-- > 0;) {
      const std::size_t n_in = arch.layer_sizes[l];
      const std::size_t n_out = arch.layer_sizes[l + 1];
      const std::size_t offset = arch.layer_offset(l);
      const auto& in = t.out[l];
      for (std::size_t o = 0; o < n_out; ++o) {
        double* g_row = grad.data() + offset + o * n_in;
        for (std::size_t i = 0; i < n_in; ++i) g_row[i] += delta[o] * in[i];
        grad[offset + n_out * n_in + o] += delta[o];
      }
      if (l == 0) break;
      delta_prev.assign(n_in, 0.0);
      for (std::size_t o = 0; o < n_out; ++o) {
        const double* row = w.data() + offset + o * n_in;
        for (std::size_t i = 0; i < n_in; ++i) delta_prev[i] += row[i] * delta[o];
      }
      for (std::size_t i = 0; i < n_in; ++i)
        delta_prev[i] *= activate_grad(arch.hidden_activation, t.pre[l][i], t.out[l][i]);
      delta.swap(delta_prev);
    }
  }
  return total;
}

std::vector<double> backprop(const Architecture& arch, std::span<const double> w,
                             std::span<const FeatureVector> batch) {
  std::vector<double> grad(arch.n_weights(), 0.0);
  if (w.size() != arch.n_weights())
    fail(ErrorCode::kDimensionMismatch, "weight vector has wrong length");
  log_likelihood_with_gradient(arch, w, batch, grad);
  return grad;
}

std::vector<double> backprop(const Architecture& arch, std::span<const double> w,
                             const FeatureSet& batch) {
  return backprop(arch, w, std::span<const FeatureVector>(batch.vectors));
}

}  // namespace hemobnn
