#include "run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "hemobnn/errors.hpp"

namespace hemobnn::cli {
namespace {

using nlohmann::json;

// Reads fields of one JSON object, remembering which keys were consumed so
// leftovers can be reported.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(ErrorCode::kConfig, where("") + "expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!it->is_boolean()) throw std::runtime_error("expected a boolean");
      } else if constexpr (std::is_unsigned_v<T>) {
        if (!it->is_number_unsigned()) throw std::runtime_error("expected a non-negative integer");
      } else if constexpr (std::is_integral_v<T>) {
        if (!it->is_number_integer()) throw std::runtime_error("expected an integer");
      } else if constexpr (std::is_arithmetic_v<T>) {
        if (!it->is_number()) throw std::runtime_error("expected a number");
      }
      out = it->get<T>();
    } catch (const std::exception& e) {
      fail(ErrorCode::kConfig, where(key) + e.what());
    }
  }

  Section sub(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    static const json empty = json::object();
    return Section(it == j_.end() ? empty : *it, path_ + key + ".");
  }

  bool has(const char* key) const { return j_.contains(key); }
  std::string where(const std::string& key) const { return path_ + key + ": "; }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) fail(ErrorCode::kConfig, "unknown config key '" + path_ + key + "'");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_synth(Section s, SynthConfig& c) {
  s.get("n_volunteers", c.n_volunteers);
  s.get("trials_per_class", c.trials_per_class);
  s.get("sample_rate_hz", c.sample_rate_hz);
  s.get("n_channels", c.n_channels);
  s.get("effect_size", c.effect_size);
  s.get("hbr_ratio", c.hbr_ratio);
  s.get("intro_s", c.intro_s);
  s.get("task_s", c.task_s);
  s.get("break_min_s", c.break_min_s);
  s.get("break_max_s", c.break_max_s);
  s.get("lead_in_s", c.lead_in_s);
  s.get("lead_out_s", c.lead_out_s);
  Section n = s.sub("noise");
  n.get("white", c.noise.white);
  n.get("mayer", c.noise.mayer);
  n.get("respiration", c.noise.respiration);
  n.get("cardiac", c.noise.cardiac);
  n.get("mayer_hz", c.noise.mayer_hz);
  n.get("respiration_hz", c.noise.respiration_hz);
  n.get("cardiac_hz", c.noise.cardiac_hz);
  n.finish();
  s.finish();
}

void read_preprocess(Section s, PreprocessConfig& c) {
  Section f = s.sub("filter");
  int order = c.filter.order;
  f.get("order", order);
  c.filter.order = order;
  f.get("low_hz", c.filter.low_hz);
  f.get("high_hz", c.filter.high_hz);
  f.finish();
  s.get("epoch_start_s", c.epoch_start_s);
  s.get("epoch_end_s", c.epoch_end_s);
  s.get("baseline_start_s", c.baseline_start_s);
  s.get("baseline_end_s", c.baseline_end_s);
  std::vector<std::vector<double>> windows;
  s.get("windows", windows);
  if (s.has("windows")) {
    c.windows.clear();
    for (const auto& w : windows) {
      if (w.size() != 2) fail(ErrorCode::kConfig, s.where("windows") + "each window is [start_s, end_s]");
      c.windows.push_back({w[0], w[1]});
    }
  }
  s.finish();
}

void read_train(Section s, TrainConfig& c) {
  s.get("iterations", c.iterations);
  std::string name(optimizer_name(c.optimizer));
  s.get("optimizer", name);
  try {
    c.optimizer = parse_optimizer(name);
  } catch (const Error& e) {
    fail(ErrorCode::kConfig, s.where("optimizer") + e.what());
  }
  s.get("learning_rate", c.learning_rate);
  s.get("beta1", c.beta1);
  s.get("beta2", c.beta2);
  s.get("epsilon", c.epsilon);
  s.get("n_samples", c.n_samples);
  std::string mode(elbo_mode_name(c.mode));
  s.get("mode", mode);
  try {
    c.mode = parse_elbo_mode(mode);
  } catch (const Error& e) {
    fail(ErrorCode::kConfig, s.where("mode") + e.what());
  }
  s.get("convergence_tol", c.convergence_tol);
  s.get("convergence_window", c.convergence_window);
  s.get("early_stop", c.early_stop);
  s.get("restarts", c.restarts);
  s.get("batch_size", c.batch_size);
  s.get("init_mu_std", c.init_mu_std);
  s.get("init_sigma", c.init_sigma);
  s.finish();
}

// Library validators raise their own codes; the CLI reports all of them as
// configuration errors with the section prefixed.
template <typename F>
void check(const std::string& section, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    fail(ErrorCode::kConfig, section + ": " + e.what());
  }
}

}  // namespace

RunConfig merge(RunConfig c, const json& j) {
  Section root(j, "");
  root.get("seed", c.seed);
  read_synth(root.sub("synth"), c.synth);
  read_preprocess(root.sub("preprocess"), c.preprocess);
  {
    Section s = root.sub("split");
    s.get("train_fraction", c.train_fraction);
    s.get("stratified", c.stratified);
    s.finish();
  }
  root.get("standardize", c.standardize);
  root.get("pooled", c.pooled);
  {
    Section s = root.sub("network");
    s.get("hidden_layers", c.hidden_layers);
    std::string act(activation_name(c.activation));
    s.get("activation", act);
    try {
      c.activation = parse_activation(act);
    } catch (const Error& e) {
      fail(ErrorCode::kConfig, s.where("activation") + e.what());
    }
    s.finish();
  }
  {
    Section s = root.sub("prior");
    s.get("mean", c.prior.mean);
    s.get("std", c.prior.std);
    s.finish();
  }
  read_train(root.sub("train"), c.train);
  {
    Section s = root.sub("predict");
    s.get("n_samples", c.predict.n_samples);
    s.get("threshold", c.predict.threshold);
    s.finish();
  }
  {
    Section s = root.sub("trace");
    s.get("n_draws", c.trace.n_draws);
    s.get("n_seeds", c.trace.n_seeds);
    s.get("bins", c.trace.bins);
    s.finish();
  }
  root.finish();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kMissingInput, "cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::kConfig, "config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return merge(RunConfig{}, j);
}

void RunConfig::validate() const {
  check("synth", [&] { synth.validate(); });
  if (preprocess.filter.order < 1) fail(ErrorCode::kConfig, "preprocess.filter.order: must be >= 1");
  if (!(preprocess.filter.low_hz > 0.0) || !(preprocess.filter.high_hz > preprocess.filter.low_hz))
    fail(ErrorCode::kConfig, "preprocess.filter: require 0 < low_hz < high_hz");
  if (!(preprocess.epoch_start_s < preprocess.epoch_end_s))
    fail(ErrorCode::kConfig, "preprocess.epoch_start_s/epoch_end_s: start must precede end");
  if (!(preprocess.baseline_start_s < preprocess.baseline_end_s))
    fail(ErrorCode::kConfig, "preprocess.baseline_start_s/baseline_end_s: start must precede end");
  if (preprocess.windows.empty()) fail(ErrorCode::kConfig, "preprocess.windows: at least one window");
  for (const auto& w : preprocess.windows)
    if (!(w.start_s < w.end_s)) fail(ErrorCode::kConfig, "preprocess.windows: start must precede end");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    fail(ErrorCode::kConfig, "split.train_fraction: must lie in (0, 1)");
  for (std::size_t h : hidden_layers)
    if (h == 0) fail(ErrorCode::kConfig, "network.hidden_layers: sizes must be positive");
  check("prior", [&] { prior.validate(); });
  check("train", [&] { train.validate(); });
  if (predict.n_samples < 1) fail(ErrorCode::kConfig, "predict.n_samples: must be >= 1");
  if (!(predict.threshold >= 0.0 && predict.threshold <= 1.0))
    fail(ErrorCode::kConfig, "predict.threshold: must lie in [0, 1]");
  if (trace.n_draws < 2) fail(ErrorCode::kConfig, "trace.n_draws: must be >= 2");
  if (trace.n_seeds < 1) fail(ErrorCode::kConfig, "trace.n_seeds: must be >= 1");
  if (trace.bins < 1) fail(ErrorCode::kConfig, "trace.bins: must be >= 1");
}

Architecture RunConfig::architecture(std::size_t input_width) const {
  Architecture a;
  a.layer_sizes = {input_width};
  a.layer_sizes.insert(a.layer_sizes.end(), hidden_layers.begin(), hidden_layers.end());
  a.layer_sizes.push_back(1);
  a.hidden_activation = activation;
  return a;
}

json to_json(const RunConfig& c) {
  const auto& s = c.synth;
  json windows = json::array();
  for (const auto& w : c.preprocess.windows) windows.push_back({w.start_s, w.end_s});
  const auto& t = c.train;
  return {
      {"seed", c.seed},
      {"synth",
       {{"n_volunteers", s.n_volunteers},
        {"trials_per_class", s.trials_per_class},
        {"sample_rate_hz", s.sample_rate_hz},
        {"n_channels", s.n_channels},
        {"effect_size", s.effect_size},
        {"hbr_ratio", s.hbr_ratio},
        {"intro_s", s.intro_s},
        {"task_s", s.task_s},
        {"break_min_s", s.break_min_s},
        {"break_max_s", s.break_max_s},
        {"lead_in_s", s.lead_in_s},
        {"lead_out_s", s.lead_out_s},
        {"noise",
         {{"white", s.noise.white},
          {"mayer", s.noise.mayer},
          {"respiration", s.noise.respiration},
          {"cardiac", s.noise.cardiac},
          {"mayer_hz", s.noise.mayer_hz},
          {"respiration_hz", s.noise.respiration_hz},
          {"cardiac_hz", s.noise.cardiac_hz}}}}},
      {"preprocess",
       {{"filter",
         {{"order", c.preprocess.filter.order},
          {"low_hz", c.preprocess.filter.low_hz},
          {"high_hz", c.preprocess.filter.high_hz}}},
        {"epoch_start_s", c.preprocess.epoch_start_s},
        {"epoch_end_s", c.preprocess.epoch_end_s},
        {"baseline_start_s", c.preprocess.baseline_start_s},
        {"baseline_end_s", c.preprocess.baseline_end_s},
        {"windows", windows}}},
      {"split", {{"train_fraction", c.train_fraction}, {"stratified", c.stratified}}},
      {"standardize", c.standardize},
      {"pooled", c.pooled},
      {"network", {{"hidden_layers", c.hidden_layers}, {"activation", activation_name(c.activation)}}},
      {"prior", {{"mean", c.prior.mean}, {"std", c.prior.std}}},
      {"train",
       {{"iterations", t.iterations},
        {"optimizer", optimizer_name(t.optimizer)},
        {"learning_rate", t.learning_rate},
        {"beta1", t.beta1},
        {"beta2", t.beta2},
        {"epsilon", t.epsilon},
        {"n_samples", t.n_samples},
        {"mode", elbo_mode_name(t.mode)},
        {"convergence_tol", t.convergence_tol},
        {"convergence_window", t.convergence_window},
        {"early_stop", t.early_stop},
        {"restarts", t.restarts},
        {"batch_size", t.batch_size},
        {"init_mu_std", t.init_mu_std},
        {"init_sigma", t.init_sigma}}},
      {"predict", {{"n_samples", c.predict.n_samples}, {"threshold", c.predict.threshold}}},
      {"trace", {{"n_draws", c.trace.n_draws}, {"n_seeds", c.trace.n_seeds}, {"bins", c.trace.bins}}},
  };
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace hemobnn::cli
