#include "hemobnn/model_io.hpp"

#include <cstdio>

#include "hemobnn/csv.hpp"
#include "hemobnn/errors.hpp"
#include "json_writer.hpp"

namespace hemobnn {
namespace {

using nlohmann::json;

json train_config_json(const TrainConfig& c) {
  return {{"iterations", c.iterations},
          {"optimizer", optimizer_name(c.optimizer)},
          {"learning_rate", c.learning_rate},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"epsilon", c.epsilon},
          {"n_samples", c.n_samples},
          {"mode", elbo_mode_name(c.mode)},
          {"seed", c.seed},
          {"convergence_tol", c.convergence_tol},
          {"convergence_window", c.convergence_window},
          {"early_stop", c.early_stop},
          {"restarts", c.restarts},
          {"batch_size", c.batch_size},
          {"init_mu_std", c.init_mu_std},
          {"init_sigma", c.init_sigma}};
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  c.iterations = j.at("iterations").get<std::size_t>();
  c.optimizer = parse_optimizer(j.at("optimizer").get<std::string>());
  c.learning_rate = j.at("learning_rate").get<double>();
  c.beta1 = j.at("beta1").get<double>();
  c.beta2 = j.at("beta2").get<double>();
  c.epsilon = j.at("epsilon").get<double>();
  c.n_samples = j.at("n_samples").get<std::size_t>();
  c.mode = parse_elbo_mode(j.at("mode").get<std::string>());
  c.seed = j.at("seed").get<std::uint64_t>();
  c.convergence_tol = j.at("convergence_tol").get<double>();
  c.convergence_window = j.at("convergence_window").get<std::size_t>();
  c.early_stop = j.at("early_stop").get<bool>();
  c.restarts = j.at("restarts").get<std::size_t>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.init_mu_std = j.at("init_mu_std").get<double>();
  c.init_sigma = j.at("init_sigma").get<double>();
  return c;
}

json architecture_json(const Architecture& a) {
  return {{"layer_sizes", a.layer_sizes},
          {"hidden_activation", activation_name(a.hidden_activation)},
          {"output_activation", "sigmoid"}};
}

json optional_index(const std::optional<std::size_t>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<std::size_t> optional_index_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<std::size_t>();
}

}  // namespace

std::string config_hash(const Architecture& arch, const Prior& prior, const TrainConfig& cfg) {
  const json j = {{"architecture", architecture_json(arch)},
                  {"prior", {{"mean", prior.mean}, {"std", prior.std}}},
                  {"train", train_config_json(cfg)}};
  const std::string text = detail::dump_json(j, 0);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string serialize_model(const TrainedModel& m) {
  json j;
  j["format"] = "hemobnn-model";
  j["format_version"] = kModelFormatVersion;
  j["weight_layout_version"] = kWeightLayoutVersion;
  j["architecture"] = architecture_json(m.arch);
  j["label_encoding"] = {{"LFT", 0}, {"RFT", 1}};
  j["prior"] = {{"mean", m.prior.mean}, {"std", m.prior.std}};
  j["variational"] = {{"mu", m.params.mu}, {"rho", m.params.rho}};

  json windows = json::array();
  for (const auto& w : m.layout.windows) windows.push_back({w.start_s, w.end_s});
  j["feature_layout"] = {{"windows_s", windows},
                         {"n_channels", m.layout.n_channels},
                         {"chromophores", m.layout.chromophores},
                         {"feature_order", "window,chromophore,channel"}};
  if (m.scaling) {
    j["scaling"] = {{"mean", m.scaling->mean},
                    {"std", m.scaling->std},
                    {"degenerate", m.scaling->degenerate}};
  } else {
    j["scaling"] = nullptr;
  }
  j["training"] = {{"seed", m.config.seed},
                   {"config", train_config_json(m.config)},
                   {"config_hash", m.config_hash},
                   {"summary",
                    {{"iterations", m.summary.iterations},
                     {"first_window_mean", m.summary.first_window_mean},
                     {"last_window_mean", m.summary.last_window_mean},
                     {"final_elbo", m.summary.final_elbo},
                     {"converged_at", optional_index(m.summary.converged_at)}}}};
  if (m.optimizer) {
    const auto& s = *m.optimizer;
    j["optimizer_state"] = {{"restart", s.restart},     {"step", s.step},
                            {"m_mu", s.m_mu},           {"v_mu", s.v_mu},
                            {"m_rho", s.m_rho},         {"v_rho", s.v_rho},
                            {"trace", s.trace},         {"converged_at", optional_index(s.converged_at)}};
  } else {
    j["optimizer_state"] = nullptr;
  }
  return detail::dump_json(j);
}

TrainedModel deserialize_model(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kMalformedFile, origin + ": " + e.what());
  }
  TrainedModel m;
  try {
    if (j.at("format").get<std::string>() != "hemobnn-model")
      fail(ErrorCode::kMalformedFile, origin + ": not a model file");
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion)
      fail(ErrorCode::kVersionMismatch, origin + ": file format version " +
                                            std::to_string(version) + ", supported version " +
                                            std::to_string(kModelFormatVersion));
    const int layout = j.at("weight_layout_version").get<int>();
    if (layout != kWeightLayoutVersion)
      fail(ErrorCode::kVersionMismatch, origin + ": weight layout version " +
                                            std::to_string(layout) + ", supported version " +
                                            std::to_string(kWeightLayoutVersion));

    const auto& a = j.at("architecture");
    m.arch.layer_sizes = a.at("layer_sizes").get<std::vector<std::size_t>>();
    m.arch.hidden_activation = parse_activation(a.at("hidden_activation").get<std::string>());
    if (a.at("output_activation").get<std::string>() != "sigmoid")
      fail(ErrorCode::kMalformedFile, origin + ": output activation must be sigmoid");
    m.arch.validate();

    m.prior.mean = j.at("prior").at("mean").get<double>();
    m.prior.std = j.at("prior").at("std").get<double>();
    m.params.mu = j.at("variational").at("mu").get<std::vector<double>>();
    m.params.rho = j.at("variational").at("rho").get<std::vector<double>>();
    if (m.params.mu.size() != m.arch.n_weights() || m.params.rho.size() != m.arch.n_weights())
      fail(ErrorCode::kMalformedFile, origin + ": mu/rho length does not match architecture");

    const auto& fl = j.at("feature_layout");
    m.layout.windows.clear();
    for (const auto& w : fl.at("windows_s"))
      m.layout.windows.push_back({w.at(0).get<double>(), w.at(1).get<double>()});
    m.layout.n_channels = fl.at("n_channels").get<std::size_t>();
    m.layout.chromophores = fl.at("chromophores").get<std::vector<std::string>>();
    if (!j.at("scaling").is_null()) {
      Scaling s;
      s.mean = j["scaling"].at("mean").get<std::vector<double>>();
      s.std = j["scaling"].at("std").get<std::vector<double>>();
      s.degenerate = j["scaling"].at("degenerate").get<std::vector<bool>>();
      m.scaling = std::move(s);
    }

    const auto& tr = j.at("training");
    m.config = train_config_from_json(tr.at("config"));
    m.config_hash = tr.at("config_hash").get<std::string>();
    const auto& su = tr.at("summary");
    m.summary.iterations = su.at("iterations").get<std::size_t>();
    m.summary.first_window_mean = su.at("first_window_mean").get<double>();
    m.summary.last_window_mean = su.at("last_window_mean").get<double>();
    m.summary.final_elbo = su.at("final_elbo").get<double>();
    m.summary.converged_at = optional_index_from(su.at("converged_at"));

    if (!j.at("optimizer_state").is_null()) {
      const auto& o = j["optimizer_state"];
      OptimizerState s;
      s.restart = o.at("restart").get<std::size_t>();
      s.step = o.at("step").get<std::size_t>();
      s.m_mu = o.at("m_mu").get<std::vector<double>>();
      s.v_mu = o.at("v_mu").get<std::vector<double>>();
      s.m_rho = o.at("m_rho").get<std::vector<double>>();
      s.v_rho = o.at("v_rho").get<std::vector<double>>();
      s.trace = o.at("trace").get<std::vector<double>>();
      s.converged_at = optional_index_from(o.at("converged_at"));
      m.optimizer = std::move(s);
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kMalformedFile, origin + ": " + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kVersionMismatch || e.code() == ErrorCode::kMalformedFile) throw;
    fail(ErrorCode::kMalformedFile, origin + ": " + e.what());
  }
  return m;
}

void checkpoint(const TrainedModel& model, const std::filesystem::path& path) {
  csv::write_text(path, serialize_model(model));
}

TrainedModel restore(const std::filesystem::path& path) {
  return deserialize_model(csv::read_text(path), path.string());
}

}  // namespace hemobnn
