#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hemobnn/errors.hpp"
#include "hemobnn/matrix.hpp"

namespace hemobnn {

// Binary task classes. The numeric value is the label used by the classifier.
enum class TaskLabel { kLFT = 0, kRFT = 1 };

std::string_view label_name(TaskLabel label);
// Accepts "RFT" or "LFT"; anything else is a malformed-file error.
TaskLabel parse_label(std::string_view text);
inline int label_value(TaskLabel label) { return static_cast<int>(label); }

struct Marker {
  double onset_s = 0.0;
  TaskLabel label = TaskLabel::kLFT;

  bool operator==(const Marker&) const = default;
};

// Continuous multi-channel recording of concentration changes.
// hbo and hbr are [n_samples x n_channels]; markers are task onsets in seconds
// from the first sample.
struct TimeSeries {
  double sample_rate_hz = 0.0;
  Matrix hbo;
  Matrix hbr;
  std::vector<Marker> markers;

  std::size_t n_samples() const { return hbo.rows(); }
  std::size_t n_channels() const { return hbo.cols(); }
  double duration_s() const { return static_cast<double>(n_samples()) / sample_rate_hz; }

  // Throws kInvalidArgument when shapes, rate or marker onsets are invalid.
  void validate() const;
};

struct FilterSpec {
  int order = 3;
  double low_hz = 0.01;
  double high_hz = 0.1;
};

// Normalized biquad, a0 == 1, Direct Form II Transposed.
struct SecondOrderSection {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

// Digital band-pass filter. b and a are the transfer-function coefficients
// (length 2*order+1, a[0] == 1). The factored form (poles, zeros, gain and the
// equivalent second-order sections) is kept alongside: for low normalized
// cutoffs the expanded polynomials lose several digits near z = 1, so the
// frequency response and the filtering itself run on the sections.
struct FilterCoeffs {
  FilterSpec spec;
  double sample_rate_hz = 0.0;
  std::vector<double> b;
  std::vector<double> a;
  std::vector<std::complex<double>> zeros;
  std::vector<std::complex<double>> poles;
  double gain = 0.0;
  std::vector<SecondOrderSection> sections;

  int order() const { return static_cast<int>(a.size() / 2); }
};

// Analog Butterworth low-pass prototype -> band-pass -> bilinear transform with
// both band edges prewarped, so the single-pass magnitude is 1/sqrt(2) at
// low_hz and high_hz and 1 at the geometric centre.
FilterCoeffs design_bandpass(const FilterSpec& spec, double sample_rate_hz);

// Response of the designed filter at frequency f_hz (single pass).
std::complex<double> frequency_response(const FilterCoeffs& coeffs, double f_hz);
double magnitude_response(const FilterCoeffs& coeffs, double f_hz);

// Minimum signal length accepted by filtfilt: 3 * (2*order + 1) + 1.
std::size_t filtfilt_min_length(const FilterCoeffs& coeffs);

// Zero-phase forward-backward filtering. The signal is extended at both ends
// by odd reflection of 3 * (2*order) samples, each pass starts from the
// steady-state section state scaled by the edge value, and the padding is
// removed before returning. Output length equals input length.
std::vector<double> filtfilt(const FilterCoeffs& coeffs, std::span<const double> signal);

// Single forward pass from zero initial state (used by tests and diagnostics).
std::vector<double> lfilter(const FilterCoeffs& coeffs, std::span<const double> signal);

// Filters every channel of both chromophores. Markers are copied unchanged.
TimeSeries filter_recording(const FilterCoeffs& coeffs, const TimeSeries& ts);

struct Epoch {
  TaskLabel label = TaskLabel::kLFT;
  double onset_s = 0.0;
  double t_start_s = -2.0;
  double t_end_s = 28.0;
  double sample_rate_hz = 0.0;
  Matrix hbo;  // [n_epoch_samples x n_channels]
  Matrix hbr;

  std::size_t n_samples() const { return hbo.rows(); }
  std::size_t n_channels() const { return hbo.cols(); }
};

// Number of samples in the half-open window [t_start_s, t_end_s).
std::size_t epoch_length(double t_start_s, double t_end_s, double sample_rate_hz);

// Half-open sample range [first, last) of [from_s, to_s) inside an epoch.
struct SampleRange {
  std::size_t first = 0;
  std::size_t last = 0;
  std::size_t size() const { return last - first; }
};
// Throws `code` if the interval is empty or not contained in the epoch.
SampleRange epoch_sample_range(const Epoch& epoch, double from_s, double to_s,
                               ErrorCode code);

struct EpochExtraction {
  std::vector<Epoch> epochs;
  std::vector<std::string> warnings;  // one per skipped marker
};

// Cuts one epoch per marker whose window fits inside the recording. Epoch
// sample k is recording sample round((onset + t_start) * fs) + k.
EpochExtraction extract_epochs(const TimeSeries& ts, double t_start_s, double t_end_s);

// Subtracts, per channel and chromophore, the mean over [ref_start_s, ref_end_s).
Epoch baseline_correct(const Epoch& epoch, double ref_start_s, double ref_end_s);

}  // namespace hemobnn
