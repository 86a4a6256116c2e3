#pragma once

#include <filesystem>

#include "hemobnn/features.hpp"

namespace hemobnn {

// Sidecar path for a feature CSV: "features.csv" -> "features.layout.json".
std::filesystem::path layout_sidecar_path(const std::filesystem::path& features_csv);

// Feature CSV: `label,f001..fNNN` with RFT/LFT labels, values written
// bit-faithfully. The JSON sidecar records the layout (windows, channel count,
// chromophore order) and, when present, the scaling statistics.
void write_features(const FeatureSet& fs, const std::filesystem::path& features_csv);

// Reads the CSV and, if it exists, the sidecar. Without a sidecar the layout
// is a single pseudo-window of width equal to the column count.
FeatureSet read_features(const std::filesystem::path& features_csv);

}  // namespace hemobnn
