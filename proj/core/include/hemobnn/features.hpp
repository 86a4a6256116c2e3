#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hemobnn/dsp.hpp"

namespace hemobnn {

struct FeatureWindow {
  double start_s = 0.0;
  double end_s = 0.0;

  bool operator==(const FeatureWindow&) const = default;
};

// Feature ordering is window-major, then chromophore (HbO, HbR), then channel:
//   index = (w * 2 + c) * n_channels + ch
struct FeatureLayout {
  std::vector<FeatureWindow> windows{{0.0, 5.0}, {5.0, 10.0}, {10.0, 15.0}};
  std::size_t n_channels = 20;
  std::vector<std::string> chromophores{"HbO", "HbR"};

  std::size_t width() const { return windows.size() * chromophores.size() * n_channels; }
  std::size_t index(std::size_t window, std::size_t chromophore, std::size_t channel) const {
    return (window * chromophores.size() + chromophore) * n_channels + channel;
  }

  bool operator==(const FeatureLayout&) const = default;
};

struct FeatureVector {
  int label = 0;  // 0 = LFT, 1 = RFT
  std::vector<double> values;

  bool operator==(const FeatureVector&) const = default;
};

// Per-feature standardization statistics. `degenerate[i]` marks columns whose
// population std fell below 1e-12 and was replaced by 1.
struct Scaling {
  std::vector<double> mean;
  std::vector<double> std;
  std::vector<bool> degenerate;

  std::size_t size() const { return mean.size(); }
  bool operator==(const Scaling&) const = default;
};

struct FeatureSet {
  std::vector<FeatureVector> vectors;
  FeatureLayout layout;
  std::optional<Scaling> scaling;  // present once standardized

  std::size_t size() const { return vectors.size(); }
  bool empty() const { return vectors.empty(); }
  std::size_t width() const { return layout.width(); }
  std::size_t count_label(int label) const;
  std::vector<int> labels() const;

  // Throws kDimensionMismatch / kInvalidArgument if any vector is malformed.
  void validate() const;
};

// Window means of a baseline-corrected epoch.
FeatureVector extract_features(const Epoch& epoch, const FeatureLayout& layout);

// Population mean/std per feature from at least two training vectors.
Scaling fit_standardizer(const FeatureSet& train);
// (value - mean) / std per feature; the result carries `scaling`.
FeatureSet apply_standardizer(const FeatureSet& fs, const Scaling& scaling);
// Undoes apply_standardizer using fs.scaling.
FeatureSet invert_standardizer(const FeatureSet& fs);

struct SplitConfig {
  double train_fraction = 0.7;
  std::uint64_t seed = 0;
  bool stratified = true;
};

struct SplitResult {
  FeatureSet train;
  FeatureSet test;
  std::vector<std::size_t> train_indices;  // ascending, into the input set
  std::vector<std::size_t> test_indices;
};

// Deterministic train/test split. In stratified mode the total training count
// is round(fraction * N); each class gets floor(fraction * n_class) and the
// remainder goes to the classes with the largest fractional parts (ties to the
// lower label). Members are chosen by a seeded Fisher-Yates shuffle per class.
SplitResult split(const FeatureSet& fs, const SplitConfig& cfg);

// Filtering, epoching, baseline correction and window means for one recording.
struct PreprocessConfig {
  FilterSpec filter;
  double epoch_start_s = -2.0;
  double epoch_end_s = 28.0;
  double baseline_start_s = -1.0;
  double baseline_end_s = 0.0;
  std::vector<FeatureWindow> windows{{0.0, 5.0}, {5.0, 10.0}, {10.0, 15.0}};
};

struct PreprocessResult {
  FeatureSet features;
  std::vector<std::string> warnings;
};

PreprocessResult preprocess_recording(const TimeSeries& ts, const PreprocessConfig& cfg);

}  // namespace hemobnn
