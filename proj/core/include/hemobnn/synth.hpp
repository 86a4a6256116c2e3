#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hemobnn/dsp.hpp"

namespace hemobnn {

struct NoiseConfig {
  double white = 1.0;        // std of i.i.d. Gaussian noise per sample
  double mayer = 1.5;        // amplitude of the ~0.1 Hz Mayer wave
  double respiration = 0.5;  // ~0.3 Hz
  double cardiac = 0.5;      // ~1.1 Hz
  double mayer_hz = 0.1;
  double respiration_hz = 0.3;
  double cardiac_hz = 1.1;
};

struct SynthConfig {
  std::size_t n_volunteers = 5;
  std::size_t trials_per_class = 25;
  double sample_rate_hz = 10.0;
  std::size_t n_channels = 20;
  // Peak HbO amplitude added to the contralateral hemisphere.
  double effect_size = 1.0;
  // HbR response = -hbr_ratio * HbO response.
  double hbr_ratio = 1.0 / 3.0;
  NoiseConfig noise;
  double intro_s = 2.0;
  double task_s = 10.0;
  double break_min_s = 17.0;
  double break_max_s = 19.0;
  double lead_in_s = 30.0;   // rest before the first trial
  double lead_out_s = 30.0;  // rest after the last break
  std::uint64_t seed = 0;

  void validate() const;
};

// Double-gamma hemodynamic response sampled on [0, 30) s: gamma densities with
// modes at 6 s (response) and 16 s (undershoot, weight 1/6), scaled so the
// peak is 1.
std::vector<double> hrf_kernel(double sample_rate_hz);

// Task-period response: hrf_kernel convolved with a `task_s` boxcar, peak 1.
std::vector<double> task_response(double sample_rate_hz, double task_s);

// One recording per volunteer. Channels [0, n/2) are the left hemisphere,
// [n/2, n) the right. RFT trials add effect_size * task_response to
// left-hemisphere HbO and -hbr_ratio times that to HbR; LFT mirrors to the
// right. Each channel and chromophore gets white noise plus Mayer,
// respiration and cardiac sinusoids with random phases. Marker onsets are
// the task starts, aligned to the sample grid; classes are interleaved in a
// random order. Volunteer v uses derive_seed(seed, {v}).
std::vector<TimeSeries> generate(const SynthConfig& cfg);

// Single volunteer (index v of the same seed family).
TimeSeries generate_volunteer(const SynthConfig& cfg, std::size_t volunteer);

}  // namespace hemobnn
