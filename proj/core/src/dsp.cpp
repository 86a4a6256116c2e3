#include "hemobnn/dsp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hemobnn {
namespace {

using cld = std::complex<long double>;

void validate_spec(const FilterSpec& spec, double fs) {
  if (spec.order < 1) fail(ErrorCode::kInvalidSpec, "filter order must be >= 1");
  if (!(fs > 0.0) || !std::isfinite(fs))
    fail(ErrorCode::kInvalidSpec, "sample rate must be positive");
  if (!(spec.low_hz > 0.0) || !(spec.low_hz < spec.high_hz))
    fail(ErrorCode::kInvalidSpec, "require 0 < low_hz < high_hz");
  if (!(spec.high_hz < fs / 2.0)) {
    std::ostringstream os;
    os << "high cutoff " << spec.high_hz << " Hz is at or above Nyquist (" << fs / 2.0
       << " Hz)";
    fail(ErrorCode::kInvalidSpec, os.str());
  }
}

// Polynomial product in long double; coefficients in ascending powers of z^-1.
std::vector<long double> poly_mul(const std::vector<long double>& p,
                                  const std::vector<long double>& q) {
  std::vector<long double> out(p.size() + q.size() - 1, 0.0L);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) out[i + j] += p[i] * q[j];
  return out;
}

// Pairs conjugate poles (and leftover real poles) into quadratic factors.
std::vector<std::array<long double, 3>> pair_poles(std::vector<cld> poles) {
  constexpr long double kImagTol = 1e-14L;
  std::vector<cld> upper;
  std::vector<long double> real;
  for (const auto& p : poles) {
    if (std::abs(p.imag()) <= kImagTol * std::max(1.0L, std::abs(p))) {
      real.push_back(p.real());
    } else if (p.imag() > 0) {
      upper.push_back(p);
    }
  }
  std::sort(upper.begin(), upper.end(),
            [](const cld& x, const cld& y) { return std::abs(x) < std::abs(y); });
  std::sort(real.begin(), real.end());
  std::vector<std::array<long double, 3>> quads;
  for (const auto& p : upper) quads.push_back({1.0L, -2.0L * p.real(), std::norm(p)});
  for (std::size_t i = 0; i + 1 < real.size(); i += 2)
    quads.push_back({1.0L, -(real[i] + real[i + 1]), real[i] * real[i + 1]});
  return quads;
}

struct SectionState {
  double z1 = 0.0;
  double z2 = 0.0;
};

// Steady-state DF2T state of one section for a unit step input.
SectionState step_state(const SecondOrderSection& s) {
  const double dc = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
  SectionState st;
  st.z2 = s.b2 - s.a2 * dc;
  st.z1 = s.b1 - s.a1 * dc + st.z2;
  return st;
}

double section_dc_gain(const SecondOrderSection& s) {
  return (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
}

void run_sections(const std::vector<SecondOrderSection>& sections,
                  std::vector<SectionState> state, std::vector<double>& x) {
  for (std::size_t k = 0; k < sections.size(); ++k) {
    const auto& s = sections[k];
    auto& st = state[k];
    for (double& v : x) {
      const double y = s.b0 * v + st.z1;
      st.z1 = s.b1 * v - s.a1 * y + st.z2;
      st.z2 = s.b2 * v - s.a2 * y;
      v = y;
    }
  }
}

// Initial states of the cascade for a constant input equal to x0.
std::vector<SectionState> cascade_initial_state(
    const std::vector<SecondOrderSection>& sections, double x0) {
  std::vector<SectionState> out(sections.size());
  double scale = x0;
  for (std::size_t k = 0; k < sections.size(); ++k) {
    const auto st = step_state(sections[k]);
    out[k].z1 = st.z1 * scale;
    out[k].z2 = st.z2 * scale;
    scale *= section_dc_gain(sections[k]);
  }
  return out;
}

}  // namespace

std::string_view label_name(TaskLabel label) {
  return label == TaskLabel::kRFT ? "RFT" : "LFT";
}

TaskLabel parse_label(std::string_view text) {
  if (text == "RFT") return TaskLabel::kRFT;
  if (text == "LFT") return TaskLabel::kLFT;
  fail(ErrorCode::kMalformedFile, "unknown task label '" + std::string(text) + "'");
}

void TimeSeries::validate() const {
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz))
    fail(ErrorCode::kInvalidArgument, "sample rate must be positive");
  if (hbo.rows() != hbr.rows() || hbo.cols() != hbr.cols())
    fail(ErrorCode::kDimensionMismatch, "hbo and hbr dimensions differ");
  if (hbo.cols() == 0) fail(ErrorCode::kInvalidArgument, "recording has no channels");
  const double duration = duration_s();
  for (const auto& m : markers) {
    if (!(m.onset_s >= 0.0) || !(m.onset_s < duration)) {
      std::ostringstream os;
      os << "marker onset " << m.onset_s << " s outside recording [0, " << duration << ")";
      fail(ErrorCode::kInvalidArgument, os.str());
    }
  }
}

FilterCoeffs design_bandpass(const FilterSpec& spec, double sample_rate_hz) {
  validate_spec(spec, sample_rate_hz);
  const int n = spec.order;
  const long double pi = std::numbers::pi_v<long double>;
  const long double fs2 = 2.0L * sample_rate_hz;

  // Prewarped analog band edges (rad/s).
  const long double w_lo = fs2 * std::tan(pi * spec.low_hz / sample_rate_hz);
  const long double w_hi = fs2 * std::tan(pi * spec.high_hz / sample_rate_hz);
  const long double bw = w_hi - w_lo;
  const long double w0_sq = w_lo * w_hi;

  // Low-pass prototype poles on the left half of the unit circle; each maps to
  // the two roots of s^2 - p*bw*s + w0^2 under s -> (s^2 + w0^2) / (bw*s).
  std::vector<cld> analog_poles;
  for (int k = 0; k < n; ++k) {
    const long double theta = pi * static_cast<long double>(2 * k + n + 1) / (2.0L * n);
    const cld p(std::cos(theta), std::sin(theta));
    const cld half = p * bw / 2.0L;
    const cld disc = std::sqrt(half * half - w0_sq);
    analog_poles.push_back(half + disc);
    analog_poles.push_back(half - disc);
  }

  // Bilinear transform. n analog zeros at s = 0 map to z = 1, the n zeros at
  // infinity map to z = -1.
  std::vector<cld> digital_poles;
  cld denom_prod(1.0L, 0.0L);
  for (const auto& s : analog_poles) {
    digital_poles.push_back((fs2 + s) / (fs2 - s));
    denom_prod *= (fs2 - s);
  }
  const long double gain =
      (std::pow(bw, static_cast<long double>(n)) * std::pow(fs2, static_cast<long double>(n)) /
       denom_prod)
          .real();

  FilterCoeffs out;
  out.spec = spec;
  out.sample_rate_hz = sample_rate_hz;
  out.gain = static_cast<double>(gain);
  for (int k = 0; k < n; ++k) out.zeros.emplace_back(1.0, 0.0);
  for (int k = 0; k < n; ++k) out.zeros.emplace_back(-1.0, 0.0);
  for (const auto& p : digital_poles)
    out.poles.emplace_back(static_cast<double>(p.real()), static_cast<double>(p.imag()));

  // Numerator: gain * (1 - z^-2)^n.
  std::vector<long double> num{1.0L};
  for (int k = 0; k < n; ++k) num = poly_mul(num, {1.0L, 0.0L, -1.0L});
  const auto quads = pair_poles(digital_poles);
  std::vector<long double> den{1.0L};
  for (const auto& q : quads) den = poly_mul(den, {q[0], q[1], q[2]});

  out.b.reserve(num.size());
  out.a.reserve(den.size());
  for (long double c : num) out.b.push_back(static_cast<double>(gain * c));
  for (long double c : den) out.a.push_back(static_cast<double>(c));

  for (std::size_t k = 0; k < quads.size(); ++k) {
    SecondOrderSection s;
    const double g = k == 0 ? static_cast<double>(gain) : 1.0;
    s.b0 = g;
    s.b1 = 0.0;
    s.b2 = -g;
    s.a1 = static_cast<double>(quads[k][1]);
    s.a2 = static_cast<double>(quads[k][2]);
    out.sections.push_back(s);
  }
  return out;
}

std::complex<double> frequency_response(const FilterCoeffs& coeffs, double f_hz) {
  const double omega = 2.0 * std::numbers::pi * f_hz / coeffs.sample_rate_hz;
  const std::complex<double> z1 = std::polar(1.0, -omega);
  const std::complex<double> z2 = z1 * z1;
  std::complex<double> h(1.0, 0.0);
  for (const auto& s : coeffs.sections)
    h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
  return h;
}

double magnitude_response(const FilterCoeffs& coeffs, double f_hz) {
  return std::abs(frequency_response(coeffs, f_hz));
}

std::size_t filtfilt_min_length(const FilterCoeffs& coeffs) {
  return 3 * coeffs.a.size() + 1;
}

std::vector<double> lfilter(const FilterCoeffs& coeffs, std::span<const double> signal) {
  std::vector<double> x(signal.begin(), signal.end());
  run_sections(coeffs.sections, std::vector<SectionState>(coeffs.sections.size()), x);
  return x;
}

std::vector<double> filtfilt(const FilterCoeffs& coeffs, std::span<const double> signal) {
  if (coeffs.sections.empty()) fail(ErrorCode::kInvalidSpec, "filter has no sections");
  const std::size_t n = signal.size();
  const std::size_t min_len = filtfilt_min_length(coeffs);
  if (n < min_len) {
    std::ostringstream os;
    os << "signal has " << n << " samples, filtfilt needs at least " << min_len;
    fail(ErrorCode::kSignalTooShort, os.str());
  }
  const std::size_t pad = 3 * (coeffs.a.size() - 1);

  std::vector<double> ext(n + 2 * pad);
  for (std::size_t i = 0; i < pad; ++i) ext[i] = 2.0 * signal[0] - signal[pad - i];
  std::copy(signal.begin(), signal.end(), ext.begin() + static_cast<std::ptrdiff_t>(pad));
  for (std::size_t i = 0; i < pad; ++i)
    ext[pad + n + i] = 2.0 * signal[n - 1] - signal[n - 2 - i];

  run_sections(coeffs.sections, cascade_initial_state(coeffs.sections, ext.front()), ext);
  std::reverse(ext.begin(), ext.end());
  run_sections(coeffs.sections, cascade_initial_state(coeffs.sections, ext.front()), ext);
  std::reverse(ext.begin(), ext.end());

  return {ext.begin() + static_cast<std::ptrdiff_t>(pad),
          ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

TimeSeries filter_recording(const FilterCoeffs& coeffs, const TimeSeries& ts) {
  ts.validate();
  if (std::abs(ts.sample_rate_hz - coeffs.sample_rate_hz) >
      1e-9 * std::max(1.0, ts.sample_rate_hz))
    fail(ErrorCode::kInvalidSpec, "filter was designed for a different sample rate");
  TimeSeries out = ts;
  for (std::size_t ch = 0; ch < ts.n_channels(); ++ch) {
    out.hbo.set_column(ch, filtfilt(coeffs, ts.hbo.column(ch)));
    out.hbr.set_column(ch, filtfilt(coeffs, ts.hbr.column(ch)));
  }
  return out;
}

std::size_t epoch_length(double t_start_s, double t_end_s, double sample_rate_hz) {
  if (!(t_end_s > t_start_s)) fail(ErrorCode::kInvalidInterval, "epoch window is empty");
  return static_cast<std::size_t>(std::llround((t_end_s - t_start_s) * sample_rate_hz));
}

SampleRange epoch_sample_range(const Epoch& epoch, double from_s, double to_s,
                               ErrorCode code) {
  const auto first = std::llround((from_s - epoch.t_start_s) * epoch.sample_rate_hz);
  const auto last = std::llround((to_s - epoch.t_start_s) * epoch.sample_rate_hz);
  if (first < 0 || last > static_cast<long long>(epoch.n_samples()) || first >= last) {
    std::ostringstream os;
    os << "interval [" << from_s << ", " << to_s << ") s is empty or outside epoch ["
       << epoch.t_start_s << ", " << epoch.t_end_s << ") s";
    fail(code, os.str());
  }
  return {static_cast<std::size_t>(first), static_cast<std::size_t>(last)};
}

EpochExtraction extract_epochs(const TimeSeries& ts, double t_start_s, double t_end_s) {
  ts.validate();
  const std::size_t len = epoch_length(t_start_s, t_end_s, ts.sample_rate_hz);
  const auto n_total = static_cast<long long>(ts.n_samples());
  EpochExtraction out;
  for (std::size_t m = 0; m < ts.markers.size(); ++m) {
    const auto& marker = ts.markers[m];
    const long long first = std::llround((marker.onset_s + t_start_s) * ts.sample_rate_hz);
    if (first < 0 || first + static_cast<long long>(len) > n_total) {
      std::ostringstream os;
      os << "marker " << m << " (" << label_name(marker.label) << " at " << marker.onset_s
         << " s) skipped: window [" << marker.onset_s + t_start_s << ", "
         << marker.onset_s + t_end_s << ") s exceeds recording [0, " << ts.duration_s()
         << ") s";
      out.warnings.push_back(os.str());
      continue;
    }
    Epoch e;
    e.label = marker.label;
    e.onset_s = marker.onset_s;
    e.t_start_s = t_start_s;
    e.t_end_s = t_end_s;
    e.sample_rate_hz = ts.sample_rate_hz;
    e.hbo = Matrix(len, ts.n_channels());
    e.hbr = Matrix(len, ts.n_channels());
    for (std::size_t k = 0; k < len; ++k) {
      const auto src = static_cast<std::size_t>(first) + k;
      std::copy_n(ts.hbo.row(src).begin(), ts.n_channels(), e.hbo.row(k).begin());
      std::copy_n(ts.hbr.row(src).begin(), ts.n_channels(), e.hbr.row(k).begin());
    }
    out.epochs.push_back(std::move(e));
  }
  return out;
}

Epoch baseline_correct(const Epoch& epoch, double ref_start_s, double ref_end_s) {
  const SampleRange ref =
      epoch_sample_range(epoch, ref_start_s, ref_end_s, ErrorCode::kInvalidInterval);
  Epoch out = epoch;
  for (Matrix* m : {&out.hbo, &out.hbr}) {
    for (std::size_t ch = 0; ch < m->cols(); ++ch) {
      double sum = 0.0;
      for (std::size_t k = ref.first; k < ref.last; ++k) sum += (*m)(k, ch);
      const double mean = sum / static_cast<double>(ref.size());
      for (std::size_t k = 0; k < m->rows(); ++k) (*m)(k, ch) -= mean;
    }
  }
  return out;
}

}  // namespace hemobnn
