#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "hemobnn/errors.hpp"
#include "hemobnn/eval.hpp"
#include "hemobnn/features.hpp"
#include "hemobnn/predict.hpp"
#include "hemobnn/synth.hpp"
#include "hemobnn/trainer.hpp"

using namespace hemobnn;

TEST(Hrf, ShapeMatchesReferenceKernel) {
  // scipy.stats.gamma.pdf(t, 7) - gamma.pdf(t, 17) / 6 on t = k / 10, peak-normalised.
  const auto h = hrf_kernel(10.0);
  ASSERT_EQ(h.size(), 300u);
  EXPECT_EQ(std::max_element(h.begin(), h.end()) - h.begin(), 60);
  EXPECT_EQ(h[0], 0.0);
  EXPECT_EQ(h[60], 1.0);
  EXPECT_NEAR(h[100], 0.37018086178917803, 1e-13);
  EXPECT_NEAR(h[200], -0.0658724105180116, 1e-13);
  int changes = 0;
  for (std::size_t k = 2; k < h.size(); ++k) {
    EXPECT_TRUE(std::isfinite(h[k]));
    if ((h[k] < 0) != (h[k - 1] < 0)) {
      ++changes;
      EXPECT_EQ(k, 134u);
    }
  }
  EXPECT_EQ(changes, 1);
}

TEST(Hrf, PeakAtSixSecondsAtOtherRates) {
  for (double fs : {4.0, 7.8, 25.0}) {
    const auto h = hrf_kernel(fs);
    const double t_peak = static_cast<double>(std::max_element(h.begin(), h.end()) - h.begin()) / fs;
    EXPECT_LE(std::abs(t_peak - 6.0), 1.0 / fs) << fs;
  }
}

TEST(TaskResponse, BoxcarConvolutionPeak) {
  // numpy.convolve(ones(100), kernel): argmax 121, length 399.
  const auto r = task_response(10.0, 10.0);
  EXPECT_EQ(r.size(), 399u);
  EXPECT_EQ(std::max_element(r.begin(), r.end()) - r.begin(), 121);
}

TEST(Generate, ShapeAndMarkers) {
  SynthConfig cfg;
  const auto recs = generate(cfg);
  ASSERT_EQ(recs.size(), 5u);
  for (const auto& ts : recs) {
    EXPECT_EQ(ts.n_channels(), 20u);
    ASSERT_EQ(ts.markers.size(), 50u);
    int rft = 0;
    for (std::size_t i = 0; i < ts.markers.size(); ++i) {
      const auto& m = ts.markers[i];
      rft += m.label == TaskLabel::kRFT;
      EXPECT_EQ(std::round(m.onset_s * 10.0), m.onset_s * 10.0);
      EXPECT_LE(m.onset_s + 28.0, ts.duration_s());
      if (i) {
        const double gap = m.onset_s - ts.markers[i - 1].onset_s;
        EXPECT_GE(gap, 2 + 10 + 17 - 0.1);
        EXPECT_LE(gap, 2 + 10 + 19 + 0.1);
      }
    }
    EXPECT_EQ(rft, 25);
  }
  EXPECT_NE(recs[0].markers, recs[1].markers);
}

TEST(Generate, DeterministicPerSeed) {
  SynthConfig cfg;
  cfg.n_volunteers = 2;
  cfg.seed = 4;
  const auto a = generate(cfg), b = generate(cfg);
  EXPECT_EQ(a[1].hbo, b[1].hbo);
  EXPECT_EQ(a[1].markers, b[1].markers);
  cfg.seed = 5;
  EXPECT_NE(generate(cfg)[1].hbo, a[1].hbo);
}

// The effect only adds the contralateral response; noise is unchanged.
TEST(Generate, EffectIsContralateralAndAnticorrelated) {
  SynthConfig cfg;
  cfg.trials_per_class = 3;
  cfg.effect_size = 0.0;
  const auto base = generate_volunteer(cfg, 0);
  cfg.effect_size = 2.0;
  const auto act = generate_volunteer(cfg, 0);
  const auto resp = task_response(10.0, 10.0);
  for (const auto& m : act.markers) {
    const auto k0 = static_cast<std::size_t>(std::llround(m.onset_s * 10.0));
    const std::size_t peak = k0 + 121;
    const std::size_t on = m.label == TaskLabel::kRFT ? 0 : 10;
    const std::size_t off = m.label == TaskLabel::kRFT ? 10 : 0;
    EXPECT_NEAR(act.hbo(peak, on + 2) - base.hbo(peak, on + 2), 2.0, 1e-12);
    EXPECT_NEAR(act.hbr(peak, on + 2) - base.hbr(peak, on + 2), -2.0 / 3.0, 1e-12);
    EXPECT_EQ(act.hbo(peak, off + 2), base.hbo(peak, off + 2));
  }
}

namespace {

// Trial-averaged, filtered, baseline-corrected HbO over RFT epochs for one hemisphere.
std::vector<double> rft_average(const SynthConfig& cfg, std::size_t first_channel) {
  const auto ts = generate(cfg)[0];
  const auto ex = extract_epochs(filter_recording(design_bandpass(FilterSpec{}, 10.0), ts), -2.0, 28.0);
  std::vector<double> mean(300, 0.0);
  for (const auto& e0 : ex.epochs) {
    if (e0.label != TaskLabel::kRFT) continue;
    const auto e = baseline_correct(e0, -1.0, 0.0);
    for (std::size_t k = 0; k < 300; ++k)
      for (std::size_t c = first_channel; c < first_channel + 10; ++c) mean[k] += e.hbo(k, c) / 250.0;
  }
  return mean;
}

double peak_time(const std::vector<double>& m) {
  return static_cast<double>(std::max_element(m.begin(), m.end()) - m.begin()) / 10.0 - 2.0;
}

}  // namespace

TEST(Generate, TrialAveragedPeakFollowsResponse) {
  SynthConfig cfg;
  cfg.n_volunteers = 1;
  SynthConfig quiet = cfg;
  quiet.noise = {0.0, 0.0, 0.0, 0.0};
  // Boxcar*HRF peaks at 12.1 s; the zero-phase band-pass pulls it to 11.6 s.
  const auto active = rft_average(quiet, 0);
  EXPECT_NEAR(peak_time(active), 11.6, 1e-9);
  // Ipsilateral side only sees filtered tails of neighbouring LFT trials.
  const auto silent = rft_average(quiet, 10);
  EXPECT_LT(*std::max_element(silent.begin(), silent.end()), 0.1 * *std::max_element(active.begin(), active.end()));
  // With default noise the left hemisphere still dominates around the response peak.
  const auto left = rft_average(cfg, 0), right = rft_average(cfg, 10);
  double l = 0.0, r = 0.0;
  for (std::size_t k = 100; k < 160; ++k) l += left[k], r += right[k];
  EXPECT_GT(l - r, 20.0);
}

TEST(Config, ValidationNamesField) {
  SynthConfig cfg;
  cfg.effect_size = -1.0;
  try {
    cfg.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
    EXPECT_NE(std::string(e.what()).find("effect_size"), std::string::npos);
  }
  cfg = SynthConfig{};
  cfg.break_min_s = 20.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = SynthConfig{};
  cfg.noise.white = -0.1;
  EXPECT_THROW(cfg.validate(), Error);
}

// Downstream AUC grows with effect size (mean over 5 seeds, slack 0.05).
TEST(Generate, MonotoneSeparability) {
  std::vector<double> mean_auc;
  for (double effect : {0.0, 0.5, 1.0, 2.0}) {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      SynthConfig cfg;
      cfg.n_volunteers = 1;
      cfg.effect_size = effect;
      cfg.seed = 300 + seed;
      const auto fs = preprocess_recording(generate(cfg)[0], PreprocessConfig{}).features;
      const auto parts = split(fs, {0.7, seed, true});
      const auto scaling = fit_standardizer(parts.train);
      TrainConfig tc;
      tc.iterations = 1500;
      tc.seed = seed;
      const auto model = train(apply_standardizer(parts.train, scaling), Architecture{}, Prior{}, tc).model;
      const auto preds = classify_batch(model, apply_standardizer(parts.test, scaling), 200, seed);
      total += evaluate(preds, parts.test.labels()).auc;
    }
    mean_auc.push_back(total / 5);
  }
  for (std::size_t i = 1; i < mean_auc.size(); ++i) EXPECT_GE(mean_auc[i], mean_auc[i - 1] - 0.05) << i;
  EXPECT_GT(mean_auc.back(), 0.9);
}
