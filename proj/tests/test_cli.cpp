#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "commands.hpp"
#include "hemobnn/csv.hpp"
#include "hemobnn/errors.hpp"
#include "run_config.hpp"

using namespace hemobnn;
using namespace hemobnn::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

ErrorCode merge_error(const json& j, std::string* message = nullptr) {
  try {
    merge(RunConfig{}, j);
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  return ErrorCode::kNumeric;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("hemobnn_test_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

// Small but complete pipeline settings.
RunConfig small() {
  RunConfig cfg;
  cfg.seed = 11;
  cfg.synth.n_volunteers = 2;
  cfg.synth.trials_per_class = 10;
  cfg.synth.effect_size = 2.0;
  cfg.train.iterations = 300;
  cfg.predict.n_samples = 50;
  cfg.trace.n_draws = 40;
  cfg.trace.bins = 8;
  return cfg;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(HEMOBNN_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(RunConfig, MergeOverlaysKnownKeys) {
  const auto cfg = merge(RunConfig{}, json::parse(R"({
    "seed": 9,
    "synth": {"effect_size": 0.5, "noise": {"mayer": 2.0}},
    "preprocess": {"filter": {"order": 4}, "windows": [[0, 5], [5, 10]]},
    "network": {"hidden_layers": [8], "activation": "relu"},
    "train": {"iterations": 123, "mode": "analytic_kl"},
    "predict": {"n_samples": 7}
  })"));
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(cfg.synth.effect_size, 0.5);
  EXPECT_EQ(cfg.synth.noise.mayer, 2.0);
  EXPECT_EQ(cfg.synth.noise.white, 1.0);
  EXPECT_EQ(cfg.preprocess.filter.order, 4);
  ASSERT_EQ(cfg.preprocess.windows.size(), 2u);
  EXPECT_EQ(cfg.preprocess.windows[1].end_s, 10.0);
  EXPECT_EQ(cfg.hidden_layers, (std::vector<std::size_t>{8}));
  EXPECT_EQ(cfg.activation, Activation::kRelu);
  EXPECT_EQ(cfg.train.iterations, 123u);
  EXPECT_EQ(cfg.train.mode, ElboMode::kAnalyticKl);
  EXPECT_EQ(cfg.predict.n_samples, 7u);
  EXPECT_EQ(cfg.architecture(6).layer_sizes, (std::vector<std::size_t>{6, 8, 1}));
}

TEST(RunConfig, RejectsUnknownKeysAndBadTypes) {
  std::string msg;
  EXPECT_EQ(merge_error(json::parse(R"({"train": {"iteratons": 5}})"), &msg), ErrorCode::kConfig);
  EXPECT_NE(msg.find("train.iteratons"), std::string::npos) << msg;
  EXPECT_EQ(merge_error(json::parse(R"({"train": {"iterations": "many"}})"), &msg), ErrorCode::kConfig);
  EXPECT_NE(msg.find("train.iterations"), std::string::npos) << msg;
  EXPECT_EQ(merge_error(json::parse(R"({"train": {"iterations": -3}})")), ErrorCode::kConfig);
  EXPECT_EQ(merge_error(json::parse(R"({"stratified": 1})")), ErrorCode::kConfig);
  EXPECT_EQ(merge_error(json::parse(R"({"network": {"activation": "gelu"}})")), ErrorCode::kConfig);
  EXPECT_EQ(merge_error(json::parse(R"([1, 2])")), ErrorCode::kConfig);
}

TEST(RunConfig, ValidateNamesField) {
  RunConfig cfg;
  cfg.train_fraction = 1.5;
  try {
    cfg.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
    EXPECT_NE(std::string(e.what()).find("train_fraction"), std::string::npos);
  }
}

TEST(RunConfig, JsonRoundTrip) {
  RunConfig cfg = small();
  cfg.hidden_layers = {3, 4};
  cfg.prior.std = 2.5;
  const json j = to_json(cfg);
  EXPECT_EQ(to_json(merge(RunConfig{}, j)), j);
  const auto dir = scratch("roundtrip");
  fs::create_directories(dir);
  const auto path = dir / "c.json";
  csv::write_text(path, dump(j));
  EXPECT_EQ(to_json(load_config(path)), j);
  EXPECT_THROW(load_config(path.parent_path() / "missing.json"), Error);
}

TEST(Commands, PipelineWritesExpectedFiles) {
  const auto root = scratch("pipeline");
  const RunConfig cfg = small();
  cmd_synth(cfg, root / "synth");
  EXPECT_TRUE(fs::exists(root / "synth/volunteer_01/recording.csv"));
  EXPECT_TRUE(fs::exists(root / "synth/volunteer_02/markers.csv"));
  cmd_preprocess(cfg, root / "synth", root / "features");
  EXPECT_TRUE(fs::exists(root / "features/volunteer_02/features.csv"));
  cmd_train(cfg, root / "features", root / "train");
  for (const char* f : {"model.json", "train.csv", "test.csv", "elbo_trace.csv", "elbo.svg"})
    EXPECT_TRUE(fs::exists(root / "train/volunteer_01" / f)) << f;
  const auto trace = csv::read_text(root / "train/volunteer_01/elbo_trace.csv");
  EXPECT_EQ(trace.rfind("iteration,elbo\n1,", 0), 0u);
  cmd_predict(cfg, root / "train", std::nullopt, root / "predict");
  const auto preds = csv::read_text(root / "predict/volunteer_01/predictions.csv");
  EXPECT_EQ(preds.rfind("item_id,p_mean,label,epistemic_var,aleatoric_var,total_var\n", 0), 0u);
  cmd_evaluate(cfg, root / "train", std::nullopt, root / "eval");
  const auto report = json::parse(csv::read_text(root / "eval/volunteer_01/report.json"));
  EXPECT_GE(report["auc"].get<double>(), 0.0);
  EXPECT_EQ(report["n_items"].get<int>(), 6);
  EXPECT_TRUE(fs::exists(root / "eval/volunteer_01/roc.svg"));
  EXPECT_EQ(json::parse(csv::read_text(root / "eval/summary.json"))["n"].get<int>(), 2);
  cmd_trace(cfg, root / "train/volunteer_02", 3, root / "trace");
  const auto tcsv = csv::read_text(root / "trace/trace.csv");
  EXPECT_EQ(tcsv.rfind("draw_index,seed_", 0), 0u);
  EXPECT_TRUE(fs::exists(root / "trace/trace.svg"));
  EXPECT_EQ(to_json(load_config(root / "trace/effective_config.json")), to_json(cfg));
  try {
    cmd_trace(cfg, root / "train/volunteer_02", 100000, root / "trace2");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(Commands, MissingInputIsReported) {
  const auto root = scratch("missing");
  try {
    cmd_preprocess(small(), root / "nothing", root / "out");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingInput);
  }
}

TEST(Binary, ExitCodes) {
  const auto root = scratch("binary");
  EXPECT_EQ(run_cli("--out " + root.string() + " synth --volunteers 1 --set synth.trials_per_class=2"), 0);
  EXPECT_TRUE(fs::exists(root / "volunteer_01/recording.csv"));
  EXPECT_EQ(run_cli("--out " + root.string() + "/x synth --effect-size -1"), 2);
  EXPECT_EQ(run_cli("--out " + root.string() + "/x synth --set synth.bogus=1"), 2);
  EXPECT_EQ(run_cli("--out " + root.string() + "/x frobnicate"), 2);
  EXPECT_EQ(run_cli("synth"), 2);
  EXPECT_EQ(run_cli("--out " + root.string() + "/x preprocess --in " + root.string() + "/none"), 2);
}
