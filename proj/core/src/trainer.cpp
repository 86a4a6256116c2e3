#include "hemobnn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hemobnn/errors.hpp"
#include "hemobnn/model_io.hpp"

namespace hemobnn {
namespace {

constexpr std::uint64_t kInitStream = 0x494E4954;  // "INIT"
constexpr std::uint64_t kStepStream = 0x53544550;  // "STEP"

// Full batch, or a fresh minibatch each step with likelihood scaled by N/|B|.
class BatchedLikelihood final : public LikelihoodModel {
 public:
  BatchedLikelihood(const Architecture& arch, std::span<const FeatureVector> data,
                    std::size_t batch_size)
      : arch_(arch), data_(data), batch_size_(batch_size) {}

  bool minibatch() const { return batch_size_ > 0 && batch_size_ < data_.size(); }

  void select(Rng& rng) {
    if (!minibatch()) return;
    std::vector<std::size_t> idx(data_.size());
    std::iota(idx.begin(), idx.end(), 0);
    // Partial Fisher-Yates: the first batch_size entries are a uniform subset.
    for (std::size_t i = 0; i < batch_size_; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.uniform_index(idx.size() - i));
      std::swap(idx[i], idx[j]);
    }
    std::sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(batch_size_));
    batch_.clear();
    for (std::size_t i = 0; i < batch_size_; ++i) batch_.push_back(data_[idx[i]]);
  }

  std::size_t n_weights() const override { return arch_.n_weights(); }
  double log_likelihood(std::span<const double> w) const override {
    return current().log_likelihood(w);
  }
  double log_likelihood_with_gradient(std::span<const double> w,
                                      std::span<double> grad) const override {
    return current().log_likelihood_with_gradient(w, grad);
  }

 private:
  NetworkLikelihood current() const {
    if (!minibatch()) return NetworkLikelihood(arch_, data_);
    return NetworkLikelihood(arch_, batch_,
                             static_cast<double>(data_.size()) / static_cast<double>(batch_size_));
  }

  Architecture arch_;
  std::span<const FeatureVector> data_;
  std::size_t batch_size_;
  std::vector<FeatureVector> batch_;
};

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double window_mean(std::span<const double> v, std::size_t begin, std::size_t end) {
  double s = 0.0;
  for (std::size_t i = begin; i < end; ++i) s += v[i];
  return s / static_cast<double>(end - begin);
}

void adam_update(std::vector<double>& param, std::span<const double> grad, std::vector<double>& m,
                 std::vector<double>& v, const TrainConfig& cfg, double bias1, double bias2) {
  for (std::size_t i = 0; i < param.size(); ++i) {
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grad[i];
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
    const double m_hat = m[i] / bias1;
    const double v_hat = v[i] / bias2;
    param[i] += cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
  }
}

TrainResult finish(const Architecture& arch, const Prior& prior, const FeatureSet& train_set,
                   const TrainConfig& cfg, OptimizeResult best) {
  TrainResult out;
  out.trace.elbo = best.state.trace;
  out.model.arch = arch;
  out.model.params = std::move(best.params);
  out.model.prior = prior;
  out.model.layout = train_set.layout;
  out.model.scaling = train_set.scaling;
  out.model.config = cfg;
  out.model.config_hash = config_hash(arch, prior, cfg);
  out.model.summary = summarize_trace(out.trace.elbo, best.state.converged_at);
  out.model.optimizer = std::move(best.state);
  return out;
}

std::vector<std::string> check_training_set(const FeatureSet& train_set, const Architecture& arch) {
  if (train_set.empty()) fail(ErrorCode::kInsufficientData, "training set is empty");
  train_set.validate();
  if (train_set.width() != arch.input_size())
    fail(ErrorCode::kDimensionMismatch, "features have width " + std::to_string(train_set.width()) +
                                            ", network input is " +
                                            std::to_string(arch.input_size()));
  std::vector<std::string> warnings;
  if (train_set.count_label(0) == 0 || train_set.count_label(1) == 0)
    warnings.push_back("training set contains a single class; the model will learn the base rate");
  return warnings;
}

}  // namespace

std::string_view optimizer_name(OptimizerKind kind) {
  return kind == OptimizerKind::kAdam ? "adam" : "sgd";
}

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "adam") return OptimizerKind::kAdam;
  if (name == "sgd") return OptimizerKind::kSgd;
  fail(ErrorCode::kInvalidArgument, "unknown optimizer '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorCode::kInvalidArgument, what); };
  if (iterations < 1) bad("iterations must be >= 1");
  // Zero is allowed: it freezes the parameters, useful as a control run.
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) bad("learning_rate must be >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    bad("adam betas must lie in [0, 1)");
  if (!(epsilon > 0.0)) bad("adam epsilon must be positive");
  if (n_samples < 1) bad("n_samples must be >= 1");
  if (!(convergence_tol > 0.0)) bad("convergence_tol must be positive");
  if (convergence_window < 1) bad("convergence_window must be >= 1");
  if (restarts < 1) bad("restarts must be >= 1");
  if (!(init_mu_std >= 0.0)) bad("init_mu_std must be >= 0");
  if (!(init_sigma > 0.0)) bad("init_sigma must be positive");
}

TraceSummary summarize_trace(std::span<const double> trace,
                             std::optional<std::size_t> converged_at) {
  TraceSummary s;
  s.iterations = trace.size();
  s.converged_at = converged_at;
  if (trace.empty()) return s;
  const std::size_t w = std::max<std::size_t>(1, trace.size() / 10);
  s.first_window_mean = window_mean(trace, 0, w);
  s.last_window_mean = window_mean(trace, trace.size() - w, trace.size());
  s.final_elbo = trace.back();
  return s;
}

OptimizeResult optimize_elbo(const LikelihoodModel& model, const Prior& prior,
                             VariationalParams params, const TrainConfig& cfg,
                             std::size_t restart, std::optional<OptimizerState> state,
                             const StepHook& before_step) {
  cfg.validate();
  prior.validate();
  params.validate();
  const std::size_t n = model.n_weights();
  if (params.size() != n)
    fail(ErrorCode::kDimensionMismatch, "parameter count does not match the model");

  OptimizeResult out;
  if (state) {
    out.state = std::move(*state);
    if (out.state.m_mu.size() != n && cfg.optimizer == OptimizerKind::kAdam)
      fail(ErrorCode::kDimensionMismatch, "optimizer state does not match the model");
  } else {
    out.state.restart = restart;
    out.state.m_mu.assign(n, 0.0);
    out.state.v_mu.assign(n, 0.0);
    out.state.m_rho.assign(n, 0.0);
    out.state.v_rho.assign(n, 0.0);
  }
  auto& st = out.state;
  const std::size_t win = cfg.convergence_window;

  while (st.step < cfg.iterations) {
    const std::size_t t = st.step;
    Rng rng(derive_seed(cfg.seed, {kStepStream, st.restart, t}));
    if (before_step) before_step(t, rng);

    const ElboGradient g = elbo_gradients(params, prior, model, cfg.n_samples, cfg.mode, rng);
    if (!std::isfinite(g.elbo) || !all_finite(g.d_mu) || !all_finite(g.d_rho)) {
      std::ostringstream os;
      os << "ELBO or its gradient became non-finite at iteration " << t << " (restart "
         << st.restart << ")";
      fail(ErrorCode::kNumeric, os.str());
    }
    st.trace.push_back(g.elbo);

    if (cfg.optimizer == OptimizerKind::kAdam) {
      const double step_no = static_cast<double>(t + 1);
      const double bias1 = 1.0 - std::pow(cfg.beta1, step_no);
      const double bias2 = 1.0 - std::pow(cfg.beta2, step_no);
      adam_update(params.mu, g.d_mu, st.m_mu, st.v_mu, cfg, bias1, bias2);
      adam_update(params.rho, g.d_rho, st.m_rho, st.v_rho, cfg, bias1, bias2);
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        params.mu[i] += cfg.learning_rate * g.d_mu[i];
        params.rho[i] += cfg.learning_rate * g.d_rho[i];
      }
    }
    if (!all_finite(params.mu) || !all_finite(params.rho)) {
      std::ostringstream os;
      os << "variational parameters became non-finite at iteration " << t;
      fail(ErrorCode::kNumeric, os.str());
    }
    ++st.step;

    if (!st.converged_at && st.trace.size() >= 2 * win) {
      const std::size_t end = st.trace.size();
      const double now = window_mean(st.trace, end - win, end);
      const double prev = window_mean(st.trace, end - 2 * win, end - win);
      if (std::abs(now - prev) < cfg.convergence_tol * std::abs(prev)) st.converged_at = t;
    }
    if (cfg.early_stop && st.converged_at) break;
  }
  out.params = std::move(params);
  return out;
}

TrainResult train(const FeatureSet& train_set, const Architecture& arch, const Prior& prior,
                  const TrainConfig& cfg) {
  arch.validate();
  cfg.validate();
  auto warnings = check_training_set(train_set, arch);

  BatchedLikelihood model(arch, train_set.vectors, cfg.batch_size);
  const StepHook hook = [&model](std::size_t, Rng& rng) { model.select(rng); };

  std::optional<OptimizeResult> best;
  double best_score = 0.0;
  for (std::size_t r = 0; r < cfg.restarts; ++r) {
    Rng init_rng(derive_seed(cfg.seed, {kInitStream, r}));
    auto init = init_params(arch.n_weights(), init_rng, cfg.init_mu_std, cfg.init_sigma);
    auto result = optimize_elbo(model, prior, std::move(init), cfg, r, std::nullopt, hook);
    const double score = summarize_trace(result.state.trace).last_window_mean;
    if (!best || score > best_score) {
      best = std::move(result);
      best_score = score;
    }
  }
  auto out = finish(arch, prior, train_set, cfg, std::move(*best));
  out.warnings = std::move(warnings);
  return out;
}

TrainResult resume(const TrainedModel& checkpoint, const FeatureSet& train_set,
                   const TrainConfig& cfg) {
  if (!checkpoint.optimizer)
    fail(ErrorCode::kInvalidArgument, "checkpoint carries no optimizer state");
  auto warnings = check_training_set(train_set, checkpoint.arch);
  BatchedLikelihood model(checkpoint.arch, train_set.vectors, cfg.batch_size);
  const StepHook hook = [&model](std::size_t, Rng& rng) { model.select(rng); };
  auto state = *checkpoint.optimizer;
  const std::size_t restart = state.restart;
  auto result = optimize_elbo(model, checkpoint.prior, checkpoint.params, cfg, restart,
                              std::move(state), hook);
  auto out = finish(checkpoint.arch, checkpoint.prior, train_set, cfg, std::move(result));
  out.warnings = std::move(warnings);
  return out;
}

}  // namespace hemobnn
