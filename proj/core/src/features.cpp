#include "hemobnn/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "hemobnn/errors.hpp"
#include "hemobnn/rng.hpp"

namespace hemobnn {

std::size_t FeatureSet::count_label(int label) const {
  return static_cast<std::size_t>(std::count_if(
      vectors.begin(), vectors.end(), [label](const FeatureVector& v) { return v.label == label; }));
}

std::vector<int> FeatureSet::labels() const {
  std::vector<int> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) out.push_back(v.label);
  return out;
}

void FeatureSet::validate() const {
  const std::size_t w = width();
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const auto& v = vectors[i];
    if (v.values.size() != w)
      fail(ErrorCode::kDimensionMismatch, "feature vector " + std::to_string(i) + " has length " +
                                              std::to_string(v.values.size()) + ", layout width " +
                                              std::to_string(w));
    if (v.label != 0 && v.label != 1)
      fail(ErrorCode::kInvalidArgument, "label must be 0 or 1");
    for (double x : v.values)
      if (!std::isfinite(x))
        fail(ErrorCode::kInvalidArgument, "non-finite feature in vector " + std::to_string(i));
  }
  if (scaling && scaling->size() != w)
    fail(ErrorCode::kDimensionMismatch, "scaling size does not match layout width");
}

FeatureVector extract_features(const Epoch& epoch, const FeatureLayout& layout) {
  if (epoch.n_channels() != layout.n_channels)
    fail(ErrorCode::kDimensionMismatch, "epoch has " + std::to_string(epoch.n_channels()) +
                                            " channels, layout expects " +
                                            std::to_string(layout.n_channels));
  if (layout.chromophores.size() != 2)
    fail(ErrorCode::kInvalidArgument, "layout must list exactly two chromophores");
  FeatureVector out;
  out.label = label_value(epoch.label);
  out.values.assign(layout.width(), 0.0);
  for (std::size_t w = 0; w < layout.windows.size(); ++w) {
    const auto range = epoch_sample_range(epoch, layout.windows[w].start_s,
                                          layout.windows[w].end_s, ErrorCode::kInvalidWindow);
    const double inv = 1.0 / static_cast<double>(range.size());
    for (std::size_t c = 0; c < 2; ++c) {
      const Matrix& m = c == 0 ? epoch.hbo : epoch.hbr;
      for (std::size_t ch = 0; ch < layout.n_channels; ++ch) {
        double sum = 0.0;
        for (std::size_t k = range.first; k < range.last; ++k) sum += m(k, ch);
        out.values[layout.index(w, c, ch)] = sum * inv;
      }
    }
  }
  return out;
}

Scaling fit_standardizer(const FeatureSet& train) {
  if (train.size() < 2)
    fail(ErrorCode::kInsufficientData, "standardizer needs at least 2 vectors, got " +
                                           std::to_string(train.size()));
  train.validate();
  const std::size_t w = train.width();
  const double n = static_cast<double>(train.size());
  Scaling s;
  s.mean.assign(w, 0.0);
  s.std.assign(w, 0.0);
  s.degenerate.assign(w, false);
  for (const auto& v : train.vectors)
    for (std::size_t j = 0; j < w; ++j) s.mean[j] += v.values[j];
  for (double& m : s.mean) m /= n;
  for (const auto& v : train.vectors)
    for (std::size_t j = 0; j < w; ++j) {
      const double d = v.values[j] - s.mean[j];
      s.std[j] += d * d;
    }
  for (std::size_t j = 0; j < w; ++j) {
    s.std[j] = std::sqrt(s.std[j] / n);
    if (s.std[j] < 1e-12) {
      s.std[j] = 1.0;
      s.degenerate[j] = true;
    }
  }
  return s;
}

FeatureSet apply_standardizer(const FeatureSet& fs, const Scaling& scaling) {
  if (scaling.size() != fs.width() || scaling.std.size() != fs.width())
    fail(ErrorCode::kDimensionMismatch, "scaling has " + std::to_string(scaling.size()) +
                                            " features, data has " + std::to_string(fs.width()));
  fs.validate();
  FeatureSet out = fs;
  for (auto& v : out.vectors)
    for (std::size_t j = 0; j < v.values.size(); ++j)
      v.values[j] = (v.values[j] - scaling.mean[j]) / scaling.std[j];
  out.scaling = scaling;
  return out;
}

FeatureSet invert_standardizer(const FeatureSet& fs) {
  if (!fs.scaling) fail(ErrorCode::kInvalidArgument, "feature set is not standardized");
  const Scaling& s = *fs.scaling;
  FeatureSet out = fs;
  for (auto& v : out.vectors)
    for (std::size_t j = 0; j < v.values.size(); ++j)
      v.values[j] = v.values[j] * s.std[j] + s.mean[j];
  out.scaling.reset();
  return out;
}

SplitResult split(const FeatureSet& fs, const SplitConfig& cfg) {
  if (!(cfg.train_fraction > 0.0) || !(cfg.train_fraction < 1.0))
    fail(ErrorCode::kInvalidArgument, "train_fraction must lie in (0, 1)");
  const std::size_t n = fs.size();
  std::vector<bool> in_train(n, false);

  if (cfg.stratified) {
    std::array<std::vector<std::size_t>, 2> members;
    for (std::size_t i = 0; i < n; ++i) members[static_cast<std::size_t>(fs.vectors[i].label)].push_back(i);
    for (int c = 0; c < 2; ++c)
      if (members[static_cast<std::size_t>(c)].empty())
        fail(ErrorCode::kEmptyClass, "class " + std::to_string(c) + " has no vectors");

    const auto total = static_cast<std::size_t>(std::llround(cfg.train_fraction * static_cast<double>(n)));
    std::array<std::size_t, 2> take{};
    std::array<double, 2> frac{};
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < 2; ++c) {
      const double exact = cfg.train_fraction * static_cast<double>(members[c].size());
      take[c] = static_cast<std::size_t>(std::floor(exact));
      frac[c] = exact - std::floor(exact);
      assigned += take[c];
    }
    std::array<std::size_t, 2> order{0, 1};
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return frac[x] > frac[y]; });
    for (std::size_t k = 0; assigned < total && k < 2; ++k) {
      if (take[order[k]] < members[order[k]].size()) {
        ++take[order[k]];
        ++assigned;
      }
    }
    for (std::size_t c = 0; c < 2; ++c) {
      Rng rng(derive_seed(cfg.seed, {0x5350u, c}));
      shuffle(std::span<std::size_t>(members[c]), rng);
      for (std::size_t k = 0; k < take[c]; ++k) in_train[members[c][k]] = true;
    }
  } else {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(derive_seed(cfg.seed, {0x5350u, 2u}));
    shuffle(std::span<std::size_t>(idx), rng);
    const auto total = static_cast<std::size_t>(std::llround(cfg.train_fraction * static_cast<double>(n)));
    for (std::size_t k = 0; k < total; ++k) in_train[idx[k]] = true;
  }

  SplitResult out;
  out.train.layout = out.test.layout = fs.layout;
  out.train.scaling = out.test.scaling = fs.scaling;
  for (std::size_t i = 0; i < n; ++i) {
    if (in_train[i]) {
      out.train.vectors.push_back(fs.vectors[i]);
      out.train_indices.push_back(i);
    } else {
      out.test.vectors.push_back(fs.vectors[i]);
      out.test_indices.push_back(i);
    }
  }
  return out;
}

PreprocessResult preprocess_recording(const TimeSeries& ts, const PreprocessConfig& cfg) {
  const FilterCoeffs coeffs = design_bandpass(cfg.filter, ts.sample_rate_hz);
  const TimeSeries filtered = filter_recording(coeffs, ts);
  auto extraction = extract_epochs(filtered, cfg.epoch_start_s, cfg.epoch_end_s);

  PreprocessResult out;
  out.warnings = std::move(extraction.warnings);
  out.features.layout.windows = cfg.windows;
  out.features.layout.n_channels = ts.n_channels();
  for (const auto& epoch : extraction.epochs) {
    const Epoch corrected = baseline_correct(epoch, cfg.baseline_start_s, cfg.baseline_end_s);
    out.features.vectors.push_back(extract_features(corrected, out.features.layout));
  }
  return out;
}

}  // namespace hemobnn
