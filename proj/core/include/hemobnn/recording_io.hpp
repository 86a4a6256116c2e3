#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hemobnn/dsp.hpp"

namespace hemobnn {

// Column name for channel index `ch` (0-based): "hbo_ch01" ... "hbr_ch20".
// Indices are zero-padded to two digits (more when there are >= 100 channels).
std::string channel_column(std::string_view chromophore, std::size_t ch, std::size_t n_channels);

// Recording CSV: `time_s,hbo_ch01..hbo_chNN,hbr_ch01..hbr_chNN`, one row per
// sample, strictly increasing uniform time. The sample rate is inferred from
// the time column (uniformity checked to 1e-6 relative). Marker onsets are
// shifted by the first time stamp so they are relative to sample 0.
TimeSeries read_recording(const std::filesystem::path& recording_csv,
                          const std::filesystem::path& markers_csv);

std::vector<Marker> read_markers(const std::filesystem::path& markers_csv);

void write_recording(const TimeSeries& ts, const std::filesystem::path& recording_csv);
void write_markers(const std::vector<Marker>& markers, const std::filesystem::path& markers_csv);

}  // namespace hemobnn
