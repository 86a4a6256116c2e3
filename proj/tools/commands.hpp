#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>

#include "run_config.hpp"

namespace hemobnn::cli {

namespace fs = std::filesystem;

// Each command validates the config, writes effective_config.json into `out`
// and returns normally on success; failures throw hemobnn::Error.
void cmd_synth(const RunConfig& cfg, const fs::path& out);
void cmd_preprocess(const RunConfig& cfg, const fs::path& in, const fs::path& out);
void cmd_train(const RunConfig& cfg, const fs::path& features, const fs::path& out);
void cmd_predict(const RunConfig& cfg, const fs::path& model, const std::optional<fs::path>& features,
                 const fs::path& out);
void cmd_evaluate(const RunConfig& cfg, const fs::path& model, const std::optional<fs::path>& features,
                  const fs::path& out);
void cmd_trace(const RunConfig& cfg, const fs::path& model, std::size_t weight_index, const fs::path& out);

}  // namespace hemobnn::cli
