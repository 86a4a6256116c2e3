#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "hemobnn/csv.hpp"
#include "hemobnn/errors.hpp"
#include "hemobnn/eval.hpp"
#include "hemobnn/feature_io.hpp"
#include "hemobnn/model_io.hpp"
#include "hemobnn/predict.hpp"
#include "hemobnn/recording_io.hpp"
#include "hemobnn/svg.hpp"

namespace hemobnn::cli {
namespace {

using nlohmann::json;

constexpr std::uint64_t kSplitStream = 0x53504c54;     // "SPLT"
constexpr std::uint64_t kTrainStream = 0x5452414e;     // "TRAN"
constexpr std::uint64_t kPredictStream = 0x50524544;   // "PRED"
constexpr std::uint64_t kBaselineStream = 0x42415345;  // "BASE"
constexpr std::uint64_t kTraceStream = 0x54524345;     // "TRCE"

std::string volunteer_dir(std::size_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "volunteer_%02zu", v + 1);
  return buf;
}

// One input unit: a file plus the output directory that mirrors it.
struct Unit {
  fs::path dir;  // directory holding the input file(s)
  fs::path out;
};

// `in` may be the file itself, a directory holding `file`, or a directory of
// volunteer_* subdirectories each holding `file`.
std::vector<Unit> discover(const fs::path& in, const std::string& file, const fs::path& out) {
  if (fs::is_regular_file(in)) return {{in.parent_path(), out}};
  if (!fs::is_directory(in)) fail(ErrorCode::kMissingInput, "input not found: " + in.string());
  if (fs::exists(in / file)) return {{in, out}};
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(in))
    if (e.is_directory() && e.path().filename().string().rfind("volunteer_", 0) == 0 &&
        fs::exists(e.path() / file))
      dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty())
    fail(ErrorCode::kMissingInput, "no " + file + " in " + in.string() + " or its volunteer_* directories");
  std::vector<Unit> units;
  for (const auto& d : dirs) units.push_back({d, out / d.filename()});
  return units;
}

fs::path input_file(const fs::path& in, const Unit& u, const std::string& file) {
  return fs::is_regular_file(in) ? in : u.dir / file;
}

void start(const RunConfig& cfg, const fs::path& out) {
  cfg.validate();
  fs::create_directories(out);
  csv::write_text(out / "effective_config.json", dump(to_json(cfg)));
}

std::string series_csv(const std::string& header, std::span<const double> values) {
  std::string s = header + "\n";
  for (std::size_t i = 0; i < values.size(); ++i)
    s += std::to_string(i + 1) + "," + csv::format_exact(values[i]) + "\n";
  return s;
}

FeatureSet concat(const std::vector<FeatureSet>& sets) {
  FeatureSet all = sets.front();
  for (std::size_t i = 1; i < sets.size(); ++i) {
    if (!(sets[i].layout == all.layout))
      fail(ErrorCode::kDimensionMismatch, "feature layouts differ between volunteers");
    all.vectors.insert(all.vectors.end(), sets[i].vectors.begin(), sets[i].vectors.end());
  }
  return all;
}

void train_unit(const RunConfig& cfg, const FeatureSet& features, std::size_t k, const fs::path& out) {
  if (features.scaling) fail(ErrorCode::kInvalidArgument, "training expects raw (unstandardized) features");
  SplitConfig sc{cfg.train_fraction, derive_seed(cfg.seed, {kSplitStream, k}), cfg.stratified};
  SplitResult parts = split(features, sc);
  FeatureSet train_set = parts.train;
  if (cfg.standardize) train_set = apply_standardizer(train_set, fit_standardizer(train_set));

  TrainConfig tc = cfg.train;
  tc.seed = derive_seed(cfg.seed, {kTrainStream, k});
  TrainResult res = train(train_set, cfg.architecture(features.width()), cfg.prior, tc);
  for (const auto& w : res.warnings) spdlog::warn("{}: {}", out.string(), w);

  fs::create_directories(out);
  write_features(parts.train, out / "train.csv");
  write_features(parts.test, out / "test.csv");
  checkpoint(res.model, out / "model.json");
  csv::write_text(out / "elbo_trace.csv", series_csv("iteration,elbo", res.trace.elbo));

  csv::write_text(out / "elbo.svg", svg::elbo_plot(res.trace.elbo));
  spdlog::info("{}: trained on {} vectors, final-window ELBO {:.4f}", out.string(), parts.train.size(),
               res.model.summary.last_window_mean);
}

FeatureSet model_inputs(const TrainedModel& model, const FeatureSet& raw) {
  return raw.scaling ? raw : prepare_inputs(model, raw);
}

std::string predictions_csv(const std::vector<Prediction>& preds) {
  std::string s = "item_id,p_mean,label,epistemic_var,aleatoric_var,total_var\n";
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto& p = preds[i];
    s += std::to_string(i) + "," + csv::format_exact(p.p_mean) + "," + std::to_string(p.label) + "," +
         csv::format_exact(p.epistemic_var) + "," + csv::format_exact(p.aleatoric_var) + "," +
         csv::format_exact(p.total_var) + "\n";
  }
  return s;
}

struct Scored {
  TrainedModel model;
  FeatureSet inputs;
  std::vector<Prediction> predictions;
};

Scored score_unit(const RunConfig& cfg, const fs::path& model_path, const fs::path& features_path,
                  std::size_t k) {
  Scored s{restore(model_path), {}, {}};
  s.inputs = model_inputs(s.model, read_features(features_path));
  s.predictions = classify_batch(s.model, s.inputs, cfg.predict.n_samples,
                                 derive_seed(cfg.seed, {kPredictStream, k}), cfg.predict.threshold);
  return s;
}

json thresholds_json(const std::vector<double>& t) {
  json out = json::array();
  for (double v : t) {
    if (std::isinf(v)) out.push_back("inf");
    else out.push_back(v);
  }
  return out;
}

json report_json(const EvalReport& r, const EvalReport& baseline) {
  json j = {
      {"accuracy", r.accuracy},
      {"auc", r.auc},
      {"n_items", r.n_items},
      {"n_positive", r.n_positive},
      {"n_negative", r.n_negative},
      {"positive_label", "RFT"},
      {"confusion",
       {{"true_positive", r.confusion.true_positive},
        {"false_positive", r.confusion.false_positive},
        {"true_negative", r.confusion.true_negative},
        {"false_negative", r.confusion.false_negative}}},
      {"roc", {{"fpr", r.roc.fpr}, {"tpr", r.roc.tpr}, {"thresholds", thresholds_json(r.roc.thresholds)}}},
      {"no_skill", {{"accuracy", baseline.accuracy}, {"auc", baseline.auc}}},
  };
  if (r.uncertainty)
    j["uncertainty"] = {{"mean_epistemic_var", r.uncertainty->mean_epistemic_var},
                        {"mean_aleatoric_var", r.uncertainty->mean_aleatoric_var},
                        {"mean_total_var", r.uncertainty->mean_total_var}};
  return j;
}

std::string roc_csv(const RocCurve& roc) {
  std::string s = "threshold,fpr,tpr\n";
  for (std::size_t i = 0; i < roc.size(); ++i)
    s += (std::isinf(roc.thresholds[i]) ? std::string("inf") : csv::format_exact(roc.thresholds[i])) + "," +
         csv::format_exact(roc.fpr[i]) + "," + csv::format_exact(roc.tpr[i]) + "\n";
  return s;
}

json summary_json(const Summary& s) {
  return {{"n", s.n},
          {"mean_accuracy", s.mean_accuracy},
          {"std_accuracy", s.std_accuracy},
          {"mean_auc", s.mean_auc},
          {"std_auc", s.std_auc}};
}

}  // namespace

void cmd_synth(const RunConfig& cfg, const fs::path& out) {
  start(cfg, out);
  SynthConfig sc = cfg.synth;
  sc.seed = cfg.seed;
  for (std::size_t v = 0; v < sc.n_volunteers; ++v) {
    const TimeSeries ts = generate_volunteer(sc, v);
    const fs::path dir = out / volunteer_dir(v);
    fs::create_directories(dir);
    write_recording(ts, dir / "recording.csv");
    write_markers(ts.markers, dir / "markers.csv");
    spdlog::info("{}: {} samples, {} markers", dir.string(), ts.n_samples(), ts.markers.size());
  }
}

void cmd_preprocess(const RunConfig& cfg, const fs::path& in, const fs::path& out) {
  start(cfg, out);
  for (const Unit& u : discover(in, "recording.csv", out)) {
    const TimeSeries ts = read_recording(u.dir / "recording.csv", u.dir / "markers.csv");
    PreprocessResult res = preprocess_recording(ts, cfg.preprocess);
    std::string warnings;
    for (const auto& w : res.warnings) {
      spdlog::warn("{}: {}", u.dir.string(), w);
      warnings += w + "\n";
    }
    fs::create_directories(u.out);
    write_features(res.features, u.out / "features.csv");
    csv::write_text(u.out / "warnings.txt", warnings);
    spdlog::info("{}: {} feature rows of width {}", u.out.string(), res.features.size(), res.features.width());
  }
}

void cmd_train(const RunConfig& cfg, const fs::path& features, const fs::path& out) {
  start(cfg, out);
  const auto units = discover(features, "features.csv", out);
  if (cfg.pooled) {
    std::vector<FeatureSet> sets;
    for (const Unit& u : units) sets.push_back(read_features(input_file(features, u, "features.csv")));
    train_unit(cfg, concat(sets), 0, out);
    return;
  }
  for (std::size_t k = 0; k < units.size(); ++k)
    train_unit(cfg, read_features(input_file(features, units[k], "features.csv")), k, units[k].out);
}

void cmd_predict(const RunConfig& cfg, const fs::path& model, const std::optional<fs::path>& features,
                 const fs::path& out) {
  start(cfg, out);
  const auto units = discover(model, "model.json", out);
  if (features && units.size() > 1)
    fail(ErrorCode::kInvalidArgument, "--features applies to a single model, not a directory of volunteers");
  for (std::size_t k = 0; k < units.size(); ++k) {
    const Unit& u = units[k];
    const fs::path feats = features ? *features : u.dir / "test.csv";
    const Scored s = score_unit(cfg, input_file(model, u, "model.json"), feats, k);
    fs::create_directories(u.out);
    csv::write_text(u.out / "predictions.csv", predictions_csv(s.predictions));
    spdlog::info("{}: {} predictions", u.out.string(), s.predictions.size());
  }
}

void cmd_evaluate(const RunConfig& cfg, const fs::path& model, const std::optional<fs::path>& features,
                  const fs::path& out) {
  start(cfg, out);
  const auto units = discover(model, "model.json", out);
  if (features && units.size() > 1)
    fail(ErrorCode::kInvalidArgument, "--features applies to a single model, not a directory of volunteers");
  std::vector<EvalReport> reports, baselines;
  json per_volunteer = json::array();
  for (std::size_t k = 0; k < units.size(); ++k) {
    const Unit& u = units[k];
    const fs::path feats = features ? *features : u.dir / "test.csv";
    const Scored s = score_unit(cfg, input_file(model, u, "model.json"), feats, k);
    const std::vector<int> truth = s.inputs.labels();
    EvalReport r = evaluate(s.predictions, truth);
    EvalReport b = no_skill_baseline(truth, derive_seed(cfg.seed, {kBaselineStream, k}));
    fs::create_directories(u.out);
    csv::write_text(u.out / "report.json", dump(report_json(r, b)));
    csv::write_text(u.out / "roc.csv", roc_csv(r.roc));
    csv::write_text(u.out / "roc.svg", svg::roc_plot(r.roc.fpr, r.roc.tpr, r.auc));
    csv::write_text(u.out / "predictions.csv", predictions_csv(s.predictions));
    spdlog::info("{}: accuracy {:.4f}, AUC {:.4f} (no-skill {:.4f}/{:.4f})", u.out.string(), r.accuracy, r.auc,
                 b.accuracy, b.auc);
    per_volunteer.push_back({{"name", u.out.filename().string()}, {"accuracy", r.accuracy}, {"auc", r.auc}});
    reports.push_back(std::move(r));
    baselines.push_back(std::move(b));
  }
  if (units.size() > 1) {
    const Summary s = aggregate(reports);
    json j = summary_json(s);
    j["no_skill"] = summary_json(aggregate(baselines));
    j["volunteers"] = per_volunteer;
    csv::write_text(out / "summary.json", dump(j));
    spdlog::info("{} volunteers: accuracy {:.4f} +/- {:.4f}, AUC {:.4f} +/- {:.4f}", s.n, s.mean_accuracy,
                 s.std_accuracy, s.mean_auc, s.std_auc);
  }
}

void cmd_trace(const RunConfig& cfg, const fs::path& model_path, std::size_t weight_index, const fs::path& out) {
  cfg.validate();
  const fs::path file = fs::is_directory(model_path) ? model_path / "model.json" : model_path;
  const TrainedModel model = restore(file);
  if (weight_index >= model.params.size())
    fail(ErrorCode::kInvalidArgument, "weight index " + std::to_string(weight_index) + " out of range [0, " +
                                          std::to_string(model.params.size()) + ")");
  start(cfg, out);
  std::vector<WeightTrace> traces;
  for (std::size_t j = 0; j < cfg.trace.n_seeds; ++j)
    traces.push_back(weight_trace(model, weight_index, cfg.trace.n_draws, derive_seed(cfg.seed, {kTraceStream, j})));

  std::string text = "draw_index";
  for (const auto& t : traces) text += ",seed_" + std::to_string(t.seed);
  text += "\n";
  for (std::size_t i = 0; i < cfg.trace.n_draws; ++i) {
    text += std::to_string(i);
    for (const auto& t : traces) text += "," + csv::format_exact(t.samples[i]);
    text += "\n";
  }
  csv::write_text(out / "trace.csv", text);

  std::vector<svg::HistogramSeries> hist;
  json seeds = json::array();
  for (std::size_t j = 0; j < traces.size(); ++j) {
    const auto& x = traces[j].samples;
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(x.size() - 1);
    seeds.push_back({{"seed", traces[j].seed}, {"mean", mean}, {"std", std::sqrt(var)}});
    hist.push_back({"seed " + std::to_string(traces[j].seed), x, svg::palette(j)});
  }
  const double mu = model.params.mu[weight_index];
  const double sigma = model.params.sigma()[weight_index];
  csv::write_text(out / "trace_summary.json",
                  dump({{"weight_index", weight_index}, {"mu", mu}, {"sigma", sigma}, {"n_draws", cfg.trace.n_draws},
                        {"seeds", seeds}}));
  csv::write_text(out / "trace.svg", svg::trace_histogram(weight_index, hist, cfg.trace.bins));
  spdlog::info("weight {}: mu {:.6f}, sigma {:.6f}, {} seeds x {} draws", weight_index, mu, sigma, traces.size(),
               cfg.trace.n_draws);
}

}  // namespace hemobnn::cli
