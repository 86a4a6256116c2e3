#include "hemobnn/recording_io.hpp"

#include <cmath>
#include <cstdio>

#include "hemobnn/csv.hpp"
#include "hemobnn/errors.hpp"

namespace hemobnn {

std::string channel_column(std::string_view chromophore, std::size_t ch, std::size_t n_channels) {
  const int width = n_channels >= 100 ? static_cast<int>(std::to_string(n_channels).size()) : 2;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "_ch%0*zu", width, ch + 1);
  return std::string(chromophore) + buf;
}

std::vector<Marker> read_markers(const std::filesystem::path& markers_csv) {
  const auto table = csv::read(markers_csv);
  if (table.header != std::vector<std::string>{"onset_s", "label"})
    fail(ErrorCode::kMalformedFile, markers_csv.string() + ": header must be 'onset_s,label'");
  std::vector<Marker> markers;
  for (const auto& row : table.rows) {
    Marker m;
    m.onset_s = csv::parse_double(row[0], markers_csv.string());
    try {
      m.label = parse_label(row[1]);
    } catch (const Error& e) {
      fail(ErrorCode::kMalformedFile, markers_csv.string() + ": " + e.what());
    }
    markers.push_back(m);
  }
  return markers;
}

TimeSeries read_recording(const std::filesystem::path& recording_csv,
                          const std::filesystem::path& markers_csv) {
  if (!std::filesystem::exists(markers_csv))
    fail(ErrorCode::kMissingInput, "markers file not found: " + markers_csv.string());
  const auto table = csv::read(recording_csv);
  const std::string where = recording_csv.string();
  const auto& header = table.header;
  if (header.empty() || header[0] != "time_s" || header.size() < 3 || (header.size() - 1) % 2 != 0)
    fail(ErrorCode::kMalformedFile, where + ": header must be time_s followed by hbo/hbr columns");
  const std::size_t n_ch = (header.size() - 1) / 2;
  for (std::size_t ch = 0; ch < n_ch; ++ch) {
    if (header[1 + ch] != channel_column("hbo", ch, n_ch) ||
        header[1 + n_ch + ch] != channel_column("hbr", ch, n_ch))
      fail(ErrorCode::kMalformedFile, where + ": unexpected channel column names");
  }
  const std::size_t n = table.rows.size();
  if (n < 2) fail(ErrorCode::kMalformedFile, where + ": need at least two samples");

  TimeSeries ts;
  ts.hbo = Matrix(n, n_ch);
  ts.hbr = Matrix(n, n_ch);
  std::vector<double> time(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto& row = table.rows[r];
    time[r] = csv::parse_double(row[0], where);
    for (std::size_t ch = 0; ch < n_ch; ++ch) {
      ts.hbo(r, ch) = csv::parse_double(row[1 + ch], where);
      ts.hbr(r, ch) = csv::parse_double(row[1 + n_ch + ch], where);
    }
  }
  const double dt = (time[n - 1] - time[0]) / static_cast<double>(n - 1);
  if (!(dt > 0.0)) fail(ErrorCode::kMalformedFile, where + ": time_s must be increasing");
  for (std::size_t r = 1; r < n; ++r) {
    const double step = time[r] - time[r - 1];
    if (!(step > 0.0) || std::abs(step - dt) > 1e-6 * dt)
      fail(ErrorCode::kMalformedFile,
           where + ": non-uniform time_s at row " + std::to_string(r + 1));
  }
  ts.sample_rate_hz = 1.0 / dt;
  ts.markers = read_markers(markers_csv);
  for (auto& m : ts.markers) m.onset_s -= time[0];
  ts.validate();
  return ts;
}

void write_recording(const TimeSeries& ts, const std::filesystem::path& recording_csv) {
  ts.validate();
  const std::size_t n_ch = ts.n_channels();
  std::string text = "time_s";
  for (std::size_t ch = 0; ch < n_ch; ++ch) text += "," + channel_column("hbo", ch, n_ch);
  for (std::size_t ch = 0; ch < n_ch; ++ch) text += "," + channel_column("hbr", ch, n_ch);
  text += '\n';
  for (std::size_t r = 0; r < ts.n_samples(); ++r) {
    text += csv::format_sig(static_cast<double>(r) / ts.sample_rate_hz, 12);
    for (std::size_t ch = 0; ch < n_ch; ++ch) text += "," + csv::format_sig(ts.hbo(r, ch), 10);
    for (std::size_t ch = 0; ch < n_ch; ++ch) text += "," + csv::format_sig(ts.hbr(r, ch), 10);
    text += '\n';
  }
  csv::write_text(recording_csv, text);
}

void write_markers(const std::vector<Marker>& markers, const std::filesystem::path& markers_csv) {
  std::string text = "onset_s,label\n";
  for (const auto& m : markers)
    text += csv::format_sig(m.onset_s, 12) + "," + std::string(label_name(m.label)) + "\n";
  csv::write_text(markers_csv, text);
}

}  // namespace hemobnn
