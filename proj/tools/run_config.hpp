#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"

#include "hemobnn/features.hpp"
#include "hemobnn/network.hpp"
#include "hemobnn/synth.hpp"
#include "hemobnn/trainer.hpp"
#include "hemobnn/vi.hpp"

namespace hemobnn::cli {

struct PredictSettings {
  std::size_t n_samples = 1000;
  double threshold = 0.5;
};

struct TraceSettings {
  std::size_t n_draws = 1000;
  std::size_t n_seeds = 3;
  std::size_t bins = 30;
};

// Every knob of the pipeline. Sub-seeds are derived from `seed` per command
// and per volunteer, so one number pins a whole run.
struct RunConfig {
  std::uint64_t seed = 0;
  SynthConfig synth;
  PreprocessConfig preprocess;
  double train_fraction = 0.7;
  bool stratified = true;
  bool standardize = true;
  bool pooled = false;  // one model over all volunteers instead of one each
  std::vector<std::size_t> hidden_layers{5, 5};
  Activation activation = Activation::kTanh;
  Prior prior;
  TrainConfig train;
  PredictSettings predict;
  TraceSettings trace;

  // Throws Error(kConfig) naming the offending field.
  void validate() const;
  Architecture architecture(std::size_t input_width) const;
};

// Overlays `j` onto `base`. Unknown keys and wrong types are kConfig errors
// naming the JSON path.
RunConfig merge(RunConfig base, const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& cfg);

// Pretty JSON with a trailing newline.
std::string dump(const nlohmann::json& j);

}  // namespace hemobnn::cli
