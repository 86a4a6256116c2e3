// hemobnn command-line tool.
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "hemobnn/errors.hpp"

namespace {

using namespace hemobnn;
using namespace hemobnn::cli;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
    case ErrorCode::kInvalidSpec:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kInvalidInterval:
    case ErrorCode::kInvalidWindow:
    case ErrorCode::kMissingInput:
    case ErrorCode::kMalformedFile:
    case ErrorCode::kVersionMismatch:
      return kExitUsage;
    default:
      return kExitRuntime;
  }
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("hemobnn");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("HEMOBNN_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to "off"; only honour it when asked for.
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
    else spdlog::warn("ignoring unknown HEMOBNN_LOG level '{}'", env);
  }
}

// "train.learning_rate=0.05" -> {"train": {"learning_rate": 0.05}}.
nlohmann::json override_json(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    fail(ErrorCode::kConfig, "--set expects key.path=value, got '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  std::vector<std::string> keys;
  for (std::size_t start = 0;;) {
    const auto dot = path.find('.', start);
    keys.push_back(path.substr(start, dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  for (auto it = keys.rbegin(); it != keys.rend(); ++it) value = nlohmann::json{{*it, value}};
  return value;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Bayesian neural network classification of hemodynamic recordings"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--seed", seed, "master seed (overrides the config file)");
  app.add_option("--out", out, "output directory")->required();
  app.add_option("--set", sets, "override a config value, e.g. --set train.iterations=2000");

  auto* synth = app.add_subcommand("synth", "generate synthetic recordings, one directory per volunteer");
  std::optional<double> effect_size;
  std::optional<std::size_t> volunteers;
  synth->add_option("--effect-size", effect_size, "peak HbO contrast of the task response");
  synth->add_option("--volunteers", volunteers, "number of volunteers");

  auto* preprocess = app.add_subcommand("preprocess", "filter, epoch and extract window features");
  std::string in_dir;
  preprocess->add_option("--in", in_dir, "recording directory or directory of volunteer_* folders")->required();

  auto* train = app.add_subcommand("train", "split features and fit the variational posterior");
  std::string features_in;
  std::optional<std::size_t> iterations;
  bool no_standardize = false, pooled = false;
  train->add_option("--features", features_in, "features.csv or a directory of volunteers")->required();
  train->add_option("--iterations", iterations, "optimization iterations");
  train->add_flag("--no-standardize", no_standardize, "train on raw features");
  train->add_flag("--pooled", pooled, "one model over all volunteers");

  std::string model_in;
  std::optional<std::string> features_opt;
  auto* predict = app.add_subcommand("predict", "posterior-predictive probabilities and uncertainties");
  predict->add_option("--model", model_in, "model.json or a training output directory")->required();
  predict->add_option("--features", features_opt, "feature CSV (default: test.csv beside the model)");
  auto* evaluate = app.add_subcommand("evaluate", "accuracy, ROC/AUC and no-skill comparison");
  evaluate->add_option("--model", model_in, "model.json or a training output directory")->required();
  evaluate->add_option("--features", features_opt, "feature CSV (default: test.csv beside the model)");

  auto* trace = app.add_subcommand("trace", "posterior samples of one weight over independent seeds");
  std::size_t weight_index = 0;
  std::optional<std::size_t> draws;
  trace->add_option("--model", model_in, "model.json")->required();
  trace->add_option("--index", weight_index, "flat weight index")->required();
  trace->add_option("--draws", draws, "draws per seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    RunConfig cfg = config_path ? load_config(*config_path) : RunConfig{};
    for (const auto& s : sets) cfg = merge(cfg, override_json(s));
    if (seed) cfg.seed = *seed;
    if (effect_size) cfg.synth.effect_size = *effect_size;
    if (volunteers) cfg.synth.n_volunteers = *volunteers;
    if (iterations) cfg.train.iterations = *iterations;
    if (no_standardize) cfg.standardize = false;
    if (pooled) cfg.pooled = true;
    if (draws) cfg.trace.n_draws = *draws;

    const std::optional<fs::path> features =
        features_opt ? std::optional<fs::path>(*features_opt) : std::nullopt;
    if (synth->parsed()) cmd_synth(cfg, out);
    else if (preprocess->parsed()) cmd_preprocess(cfg, in_dir, out);
    else if (train->parsed()) cmd_train(cfg, features_in, out);
    else if (predict->parsed()) cmd_predict(cfg, model_in, features, out);
    else if (evaluate->parsed()) cmd_evaluate(cfg, model_in, features, out);
    else if (trace->parsed()) cmd_trace(cfg, model_in, weight_index, out);
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return exit_code(e.code());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitRuntime;
  }
  return 0;
}
