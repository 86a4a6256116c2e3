#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "hemobnn/errors.hpp"
#include "hemobnn/features.hpp"
#include "hemobnn/rng.hpp"
#include "support.hpp"

using namespace hemobnn;

namespace {

Epoch blank_epoch(std::size_t channels, TaskLabel label = TaskLabel::kRFT) {
  Epoch e;
  e.label = label;
  e.sample_rate_hz = 10.0;
  e.hbo = Matrix(300, channels);
  e.hbr = Matrix(300, channels);
  return e;
}

FeatureSet labelled(std::size_t per_class, std::size_t dim, std::uint64_t seed) {
  auto fs = test::blobs(2 * per_class, dim, 1.0, seed);
  return fs;
}

}  // namespace

TEST(Extract, DefaultWidthAndZeros) {
  const auto v = extract_features(blank_epoch(20), FeatureLayout{});
  EXPECT_EQ(v.values.size(), 120u);
  EXPECT_EQ(v.label, 1);
  for (double x : v.values) EXPECT_EQ(x, 0.0);
}

TEST(Extract, WindowMeansAtDocumentedIndices) {
  Epoch e = blank_epoch(20);
  // Epoch sample k sits at t = -2 + k/10, so [0, 5) s is samples 20..69.
  for (std::size_t k = 20; k < 70; ++k) e.hbo(k, 0) = 2.0;
  for (std::size_t k = 120; k < 170; ++k) e.hbr(k, 3) = static_cast<double>(k - 120);  // 0..49
  const FeatureLayout layout;
  const auto v = extract_features(e, layout);
  EXPECT_EQ(v.values[0], 2.0);
  EXPECT_EQ(v.values[40], 0.0);
  EXPECT_EQ(v.values[layout.index(2, 1, 3)], 24.5);
  EXPECT_EQ(layout.index(1, 0, 0), 40u);
}

TEST(Extract, WindowOutsideEpochRejected) {
  FeatureLayout layout;
  layout.windows = {{20.0, 30.0}};
  try {
    extract_features(blank_epoch(20), layout);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidWindow);
  }
}

TEST(Extract, ChannelPermutationEquivariance) {
  Rng rng(3);
  Epoch e = blank_epoch(4);
  for (std::size_t k = 0; k < 300; ++k)
    for (std::size_t c = 0; c < 4; ++c) {
      e.hbo(k, c) = rng.normal();
      e.hbr(k, c) = rng.normal();
    }
  const std::size_t perm[4] = {2, 0, 3, 1};
  Epoch p = e;
  for (std::size_t k = 0; k < 300; ++k)
    for (std::size_t c = 0; c < 4; ++c) {
      p.hbo(k, c) = e.hbo(k, perm[c]);
      p.hbr(k, c) = e.hbr(k, perm[c]);
    }
  FeatureLayout layout;
  layout.n_channels = 4;
  const auto a = extract_features(e, layout), b = extract_features(p, layout);
  for (std::size_t w = 0; w < 3; ++w)
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t ch = 0; ch < 4; ++ch)
        EXPECT_EQ(b.values[layout.index(w, c, ch)], a.values[layout.index(w, c, perm[ch])]);
}

TEST(Standardizer, TwoVectorExample) {
  FeatureSet fs;
  fs.layout = {{{0.0, 1.0}}, 1, {"a"}};
  fs.vectors = {{0, {0.0}}, {1, {2.0}}};
  const auto s = fit_standardizer(fs);
  EXPECT_EQ(s.mean[0], 1.0);
  EXPECT_EQ(s.std[0], 1.0);
  EXPECT_FALSE(s.degenerate[0]);
}

TEST(Standardizer, DegenerateColumnAndErrors) {
  FeatureSet fs;
  fs.layout = {{{0.0, 1.0}}, 2, {"a"}};
  fs.vectors = {{0, {3.0, 1.0}}, {1, {3.0, 2.0}}, {1, {3.0, 4.0}}};
  const auto s = fit_standardizer(fs);
  EXPECT_EQ(s.std[0], 1.0);
  EXPECT_TRUE(s.degenerate[0]);
  EXPECT_FALSE(s.degenerate[1]);
  fs.vectors.resize(1);
  EXPECT_THROW(fit_standardizer(fs), Error);
}

TEST(Standardizer, ColumnsAreStandardAndInvertible) {
  auto fs = test::blobs(50, 120, 0.0, 9);
  for (auto& v : fs.vectors)
    for (std::size_t j = 0; j < v.values.size(); ++j) v.values[j] = v.values[j] * (1 + j) + 10.0 * j;
  const auto s = fit_standardizer(fs);
  const auto z = apply_standardizer(fs, s);
  for (std::size_t j = 0; j < 120; ++j) {
    double m = 0, q = 0;
    for (const auto& v : z.vectors) m += v.values[j];
    m /= 50;
    for (const auto& v : z.vectors) q += (v.values[j] - m) * (v.values[j] - m);
    EXPECT_NEAR(m, 0.0, 1e-10);
    EXPECT_NEAR(std::sqrt(q / 50), 1.0, 1e-10);
  }
  const auto back = invert_standardizer(z);
  EXPECT_FALSE(back.scaling);
  for (std::size_t i = 0; i < 50; ++i)
    for (std::size_t j = 0; j < 120; ++j) EXPECT_NEAR(back.vectors[i].values[j], fs.vectors[i].values[j], 1e-10 * (1 + std::abs(fs.vectors[i].values[j])));
}

TEST(Standardizer, TestSetShiftShowsUp) {
  auto train_set = test::blobs(40, 3, 0.0, 1);
  auto test_set = train_set;
  for (auto& v : test_set.vectors) v.values[1] += 4.0;
  const auto s = fit_standardizer(train_set);
  const auto zt = apply_standardizer(test_set, s);
  double m = 0;
  for (const auto& v : zt.vectors) m += v.values[1];
  EXPECT_NEAR(m / 40, 4.0 / s.std[1], 1e-10);
  Scaling wrong = s;
  wrong.mean.pop_back();
  EXPECT_THROW(apply_standardizer(test_set, wrong), Error);
}

TEST(Split, SeventyThirtyProportions) {
  const auto fs = labelled(25, 4, 1);
  const auto r = split(fs, {0.7, 5, true});
  EXPECT_EQ(r.train.size(), 35u);
  EXPECT_EQ(r.test.size(), 15u);
  const auto c1 = r.train.count_label(1);
  EXPECT_TRUE(c1 == 17 || c1 == 18);
}

TEST(Split, FourItemsHalf) {
  const auto fs = labelled(2, 2, 1);
  const auto r = split(fs, {0.5, 0, true});
  EXPECT_EQ(r.train.count_label(0), 1u);
  EXPECT_EQ(r.train.count_label(1), 1u);
  EXPECT_EQ(r.test.count_label(0), 1u);
  EXPECT_EQ(r.test.count_label(1), 1u);
}

// Property: for any seed, train and test partition the input.
TEST(Split, PartitionAndDeterminism) {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t per = 2 + rng.uniform_index(30);
    const auto fs = labelled(per, 2, trial);
    const SplitConfig cfg{rng.uniform(0.1, 0.9), rng.next_u64(), trial % 2 == 0};
    const auto a = split(fs, cfg), b = split(fs, cfg);
    EXPECT_EQ(a.train_indices, b.train_indices);
    std::set<std::size_t> all(a.train_indices.begin(), a.train_indices.end());
    for (auto i : a.test_indices) EXPECT_TRUE(all.insert(i).second);
    EXPECT_EQ(all.size(), fs.size());
    if (cfg.stratified)
      for (int c : {0, 1}) {
        const double expect = cfg.train_fraction * static_cast<double>(fs.count_label(c));
        EXPECT_LE(std::abs(static_cast<double>(a.train.count_label(c)) - expect), 1.0);
      }
  }
}

TEST(Split, EmptyClassRejected) {
  auto fs = labelled(5, 2, 1);
  for (auto& v : fs.vectors) v.label = 0;
  try {
    split(fs, {0.7, 0, true});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyClass);
  }
}

TEST(Preprocess, FiftyRowsOfWidth120) {
  // Pure noise recording with 25 markers per class: shape checks only.
  TimeSeries ts;
  ts.sample_rate_hz = 10.0;
  const std::size_t n = 16000;
  ts.hbo = Matrix(n, 20);
  ts.hbr = Matrix(n, 20);
  Rng rng(1);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t c = 0; c < 20; ++c) {
      ts.hbo(k, c) = rng.normal();
      ts.hbr(k, c) = rng.normal();
    }
  for (int i = 0; i < 50; ++i) ts.markers.push_back({30.0 + 30.0 * i, i % 2 ? TaskLabel::kLFT : TaskLabel::kRFT});
  const auto r = preprocess_recording(ts, PreprocessConfig{});
  EXPECT_TRUE(r.warnings.empty());
  EXPECT_EQ(r.features.size(), 50u);
  EXPECT_EQ(r.features.width(), 120u);
  EXPECT_EQ(r.features.count_label(1), 25u);
}
