#pragma once

#include <filesystem>
#include <string>

#include "hemobnn/trainer.hpp"

namespace hemobnn {

inline constexpr int kModelFormatVersion = 1;

// 64-bit FNV-1a of the canonical JSON form of the training configuration,
// rendered as 16 hex digits.
std::string config_hash(const Architecture& arch, const Prior& prior, const TrainConfig& cfg);

// Model file (JSON): format and weight-layout versions, architecture, label
// encoding, prior, mu/rho arrays (17 significant digits), feature layout and
// scaling, training config/seed/hash, trace summary and optimizer state.
std::string serialize_model(const TrainedModel& model);
TrainedModel deserialize_model(const std::string& text, const std::string& origin = "model");

void checkpoint(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel restore(const std::filesystem::path& path);

}  // namespace hemobnn
