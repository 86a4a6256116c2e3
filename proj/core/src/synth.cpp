#include "hemobnn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hemobnn/errors.hpp"
#include "hemobnn/rng.hpp"

namespace hemobnn {
namespace {

constexpr double kHrfDuration = 30.0;
constexpr double kPeakDelay = 6.0;
constexpr double kUndershootDelay = 16.0;
constexpr double kUndershootRatio = 1.0 / 6.0;

// Gamma density with unit scale; mode at shape - 1.
double gamma_pdf(double t, double shape) {
  if (t <= 0.0) return 0.0;
  return std::exp((shape - 1.0) * std::log(t) - t - std::lgamma(shape));
}

void normalize_peak(std::vector<double>& v) {
  const double peak = *std::max_element(v.begin(), v.end());
  for (double& x : v) x /= peak;
}

}  // namespace

void SynthConfig::validate() const {
  auto bad = [](const std::string& field, const std::string& why) {
    fail(ErrorCode::kConfig, "synth." + field + ": " + why);
  };
  if (n_volunteers < 1) bad("n_volunteers", "must be >= 1");
  if (trials_per_class < 1) bad("trials_per_class", "must be >= 1");
  if (!(sample_rate_hz > 0.0)) bad("sample_rate_hz", "must be positive");
  if (n_channels < 2) bad("n_channels", "must be >= 2");
  if (!(effect_size >= 0.0)) bad("effect_size", "must be >= 0");
  if (!(hbr_ratio >= 0.0)) bad("hbr_ratio", "must be >= 0");
  if (!(noise.white >= 0.0)) bad("noise.white", "must be >= 0");
  if (!(noise.mayer >= 0.0)) bad("noise.mayer", "must be >= 0");
  if (!(noise.respiration >= 0.0)) bad("noise.respiration", "must be >= 0");
  if (!(noise.cardiac >= 0.0)) bad("noise.cardiac", "must be >= 0");
  if (!(noise.mayer_hz > 0.0) || !(noise.respiration_hz > 0.0) || !(noise.cardiac_hz > 0.0))
    bad("noise", "frequencies must be positive");
  if (!(intro_s > 0.0)) bad("intro_s", "must be positive");
  if (!(task_s > 0.0)) bad("task_s", "must be positive");
  if (!(break_min_s > 0.0) || !(break_max_s >= break_min_s))
    bad("break_min_s/break_max_s", "require 0 < min <= max");
  if (!(lead_in_s > 0.0)) bad("lead_in_s", "must be positive");
  if (!(lead_out_s > 0.0)) bad("lead_out_s", "must be positive");
}

std::vector<double> hrf_kernel(double sample_rate_hz) {
  if (!(sample_rate_hz > 0.0)) fail(ErrorCode::kInvalidArgument, "sample rate must be positive");
  const auto n = static_cast<std::size_t>(std::llround(kHrfDuration * sample_rate_hz));
  std::vector<double> h(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / sample_rate_hz;
    h[k] = gamma_pdf(t, kPeakDelay + 1.0) - kUndershootRatio * gamma_pdf(t, kUndershootDelay + 1.0);
  }
  normalize_peak(h);
  return h;
}

std::vector<double> task_response(double sample_rate_hz, double task_s) {
  const auto h = hrf_kernel(sample_rate_hz);
  const auto box = static_cast<std::size_t>(std::llround(task_s * sample_rate_hz));
  std::vector<double> r(h.size() + box - 1, 0.0);
  for (std::size_t j = 0; j < box; ++j)
    for (std::size_t k = 0; k < h.size(); ++k) r[j + k] += h[k];
  normalize_peak(r);
  return r;
}

TimeSeries generate_volunteer(const SynthConfig& cfg, std::size_t volunteer) {
  cfg.validate();
  Rng rng(derive_seed(cfg.seed, {volunteer}));
  const double fs = cfg.sample_rate_hz;

  std::vector<TaskLabel> order;
  for (std::size_t i = 0; i < cfg.trials_per_class; ++i) {
    order.push_back(TaskLabel::kRFT);
    order.push_back(TaskLabel::kLFT);
  }
  shuffle(std::span<TaskLabel>(order), rng);

  TimeSeries ts;
  ts.sample_rate_hz = fs;
  double t = cfg.lead_in_s;
  for (TaskLabel label : order) {
    const double onset = std::round((t + cfg.intro_s) * fs) / fs;
    ts.markers.push_back({onset, label});
    t += cfg.intro_s + cfg.task_s + rng.uniform(cfg.break_min_s, cfg.break_max_s);
  }
  const auto n = static_cast<std::size_t>(std::ceil((t + cfg.lead_out_s) * fs));
  const std::size_t n_ch = cfg.n_channels;
  ts.hbo = Matrix(n, n_ch);
  ts.hbr = Matrix(n, n_ch);

  // Physiological noise, independent phases per channel and chromophore.
  const double two_pi = 2.0 * std::numbers::pi;
  for (Matrix* m : {&ts.hbo, &ts.hbr}) {
    for (std::size_t ch = 0; ch < n_ch; ++ch) {
      const double ph_mayer = two_pi * rng.uniform();
      const double ph_resp = two_pi * rng.uniform();
      const double ph_card = two_pi * rng.uniform();
      for (std::size_t k = 0; k < n; ++k) {
        const double tk = static_cast<double>(k) / fs;
        (*m)(k, ch) = cfg.noise.mayer * std::sin(two_pi * cfg.noise.mayer_hz * tk + ph_mayer) +
                      cfg.noise.respiration * std::sin(two_pi * cfg.noise.respiration_hz * tk + ph_resp) +
                      cfg.noise.cardiac * std::sin(two_pi * cfg.noise.cardiac_hz * tk + ph_card) +
                      cfg.noise.white * rng.normal();
      }
    }
  }

  // Contralateral task response.
  const auto response = task_response(fs, cfg.task_s);
  const std::size_t half = n_ch / 2;
  for (const auto& marker : ts.markers) {
    const auto start = static_cast<std::size_t>(std::llround(marker.onset_s * fs));
    const std::size_t ch_begin = marker.label == TaskLabel::kRFT ? 0 : half;
    const std::size_t ch_end = marker.label == TaskLabel::kRFT ? half : n_ch;
    for (std::size_t k = 0; k < response.size() && start + k < n; ++k) {
      const double hbo = cfg.effect_size * response[k];
      for (std::size_t ch = ch_begin; ch < ch_end; ++ch) {
        ts.hbo(start + k, ch) += hbo;
        ts.hbr(start + k, ch) -= cfg.hbr_ratio * hbo;
      }
    }
  }
  ts.validate();
  return ts;
}

std::vector<TimeSeries> generate(const SynthConfig& cfg) {
  cfg.validate();
  std::vector<TimeSeries> out;
  out.reserve(cfg.n_volunteers);
  for (std::size_t v = 0; v < cfg.n_volunteers; ++v) out.push_back(generate_volunteer(cfg, v));
  return out;
}

}  // namespace hemobnn
