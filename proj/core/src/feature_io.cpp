#include "hemobnn/feature_io.hpp"

#include <algorithm>
#include <string>

#include "hemobnn/csv.hpp"
#include "hemobnn/errors.hpp"
#include "json_writer.hpp"

namespace hemobnn {
namespace {

std::string feature_column(std::size_t j, std::size_t width) {
  const std::size_t digits = std::max<std::size_t>(3, std::to_string(width).size());
  std::string n = std::to_string(j + 1);
  return "f" + std::string(digits > n.size() ? digits - n.size() : 0, '0') + n;
}

nlohmann::json layout_json(const FeatureSet& fs) {
  nlohmann::json j;
  nlohmann::json windows = nlohmann::json::array();
  for (const auto& w : fs.layout.windows) windows.push_back({w.start_s, w.end_s});
  j["windows_s"] = windows;
  j["n_channels"] = fs.layout.n_channels;
  j["chromophores"] = fs.layout.chromophores;
  j["feature_order"] = "window,chromophore,channel";
  j["label_encoding"] = {{"LFT", 0}, {"RFT", 1}};
  if (fs.scaling) {
    j["scaling"] = {{"mean", fs.scaling->mean},
                    {"std", fs.scaling->std},
                    {"degenerate", fs.scaling->degenerate}};
  } else {
    j["scaling"] = nullptr;
  }
  return j;
}

}  // namespace

std::filesystem::path layout_sidecar_path(const std::filesystem::path& features_csv) {
  auto p = features_csv;
  p.replace_extension(".layout.json");
  return p;
}

void write_features(const FeatureSet& fs, const std::filesystem::path& features_csv) {
  fs.validate();
  const std::size_t w = fs.width();
  std::string text = "label";
  for (std::size_t j = 0; j < w; ++j) text += "," + feature_column(j, w);
  text += '\n';
  for (const auto& v : fs.vectors) {
    text += label_name(v.label == 1 ? TaskLabel::kRFT : TaskLabel::kLFT);
    for (double x : v.values) text += "," + csv::format_exact(x);
    text += '\n';
  }
  csv::write_text(features_csv, text);
  csv::write_text(layout_sidecar_path(features_csv), detail::dump_json(layout_json(fs)));
}

FeatureSet read_features(const std::filesystem::path& features_csv) {
  const auto table = csv::read(features_csv);
  const std::string where = features_csv.string();
  if (table.header.size() < 2 || table.header[0] != "label")
    fail(ErrorCode::kMalformedFile, where + ": header must start with 'label'");
  const std::size_t w = table.header.size() - 1;
  for (std::size_t j = 0; j < w; ++j)
    if (table.header[j + 1] != feature_column(j, w))
      fail(ErrorCode::kMalformedFile, where + ": unexpected column '" + table.header[j + 1] + "'");

  FeatureSet fs;
  const auto sidecar = layout_sidecar_path(features_csv);
  if (std::filesystem::exists(sidecar)) {
    try {
      const auto j = nlohmann::json::parse(csv::read_text(sidecar));
      fs.layout.windows.clear();
      for (const auto& win : j.at("windows_s"))
        fs.layout.windows.push_back({win.at(0).get<double>(), win.at(1).get<double>()});
      fs.layout.n_channels = j.at("n_channels").get<std::size_t>();
      fs.layout.chromophores = j.at("chromophores").get<std::vector<std::string>>();
      if (!j.at("scaling").is_null()) {
        Scaling s;
        s.mean = j["scaling"].at("mean").get<std::vector<double>>();
        s.std = j["scaling"].at("std").get<std::vector<double>>();
        s.degenerate = j["scaling"].at("degenerate").get<std::vector<bool>>();
        fs.scaling = std::move(s);
      }
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kMalformedFile, sidecar.string() + ": " + e.what());
    }
    if (fs.layout.width() != w)
      fail(ErrorCode::kMalformedFile, sidecar.string() + ": layout width " +
                                          std::to_string(fs.layout.width()) +
                                          " does not match CSV width " + std::to_string(w));
  } else {
    fs.layout.windows = {{0.0, 0.0}};
    fs.layout.chromophores = {"HbO", "HbR"};
    if (w % 2 != 0)
      fail(ErrorCode::kMalformedFile, where + ": odd width without a layout sidecar");
    fs.layout.n_channels = w / 2;
  }

  for (const auto& row : table.rows) {
    FeatureVector v;
    v.label = label_value(parse_label(row[0]));
    v.values.reserve(w);
    for (std::size_t j = 0; j < w; ++j) v.values.push_back(csv::parse_double(row[j + 1], where));
    fs.vectors.push_back(std::move(v));
  }
  fs.validate();
  return fs;
}

}  // namespace hemobnn
