#include "hemobnn/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hemobnn/errors.hpp"
#include "hemobnn/rng.hpp"

namespace hemobnn {
namespace {

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b)
    fail(ErrorCode::kDimensionMismatch,
         "length mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  if (a == 0) fail(ErrorCode::kInsufficientData, "no items to evaluate");
}

std::pair<std::size_t, std::size_t> class_counts(std::span<const int> truth) {
  std::size_t pos = 0;
  for (int t : truth) {
    if (t != 0 && t != 1) fail(ErrorCode::kInvalidArgument, "labels must be 0 or 1");
    pos += static_cast<std::size_t>(t);
  }
  return {pos, truth.size() - pos};
}

void mean_std(std::span<const double> v, double& mean, double& sd) {
  mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  sd = 0.0;
  if (v.size() < 2) return;
  for (double x : v) sd += (x - mean) * (x - mean);
  sd = std::sqrt(sd / static_cast<double>(v.size() - 1));
}

}  // namespace

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  check_lengths(predicted.size(), truth.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

Confusion confusion_matrix(std::span<const int> predicted, std::span<const int> truth) {
  check_lengths(predicted.size(), truth.size());
  Confusion c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == 1) {
      (predicted[i] == 1 ? c.true_positive : c.false_negative)++;
    } else {
      (predicted[i] == 1 ? c.false_positive : c.true_negative)++;
    }
  }
  return c;
}

RocCurve roc_curve(std::span<const double> scores, std::span<const int> truth) {
  check_lengths(scores.size(), truth.size());
  const auto [n_pos, n_neg] = class_counts(truth);
  if (n_pos == 0 || n_neg == 0)
    fail(ErrorCode::kEmptyClass, "ROC curve needs both classes in the ground truth");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve c;
  c.fpr.push_back(0.0);
  c.tpr.push_back(0.0);
  c.thresholds.push_back(std::numeric_limits<double>::infinity());
  std::size_t tp = 0, fp = 0;
  for (std::size_t k = 0; k < order.size();) {
    const double s = scores[order[k]];
    while (k < order.size() && scores[order[k]] == s) {
      (truth[order[k]] == 1 ? tp : fp)++;
      ++k;
    }
    c.fpr.push_back(static_cast<double>(fp) / static_cast<double>(n_neg));
    c.tpr.push_back(static_cast<double>(tp) / static_cast<double>(n_pos));
    c.thresholds.push_back(s);
  }
  return c;
}

double auc(const RocCurve& curve) {
  if (curve.size() < 2 || curve.fpr.size() != curve.tpr.size())
    fail(ErrorCode::kInvalidArgument, "ROC curve needs at least two points");
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i)
    area += (curve.fpr[i] - curve.fpr[i - 1]) * (curve.tpr[i] + curve.tpr[i - 1]) * 0.5;
  return area;
}

double auc_mann_whitney(std::span<const double> scores, std::span<const int> truth) {
  check_lengths(scores.size(), truth.size());
  const auto [n_pos, n_neg] = class_counts(truth);
  if (n_pos == 0 || n_neg == 0)
    fail(ErrorCode::kEmptyClass, "AUC needs both classes in the ground truth");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Sum of (doubled) mid-ranks of positives keeps the arithmetic integral.
  std::size_t doubled_rank_sum = 0;
  for (std::size_t k = 0; k < order.size();) {
    std::size_t end = k;
    std::size_t pos_in_group = 0;
    while (end < order.size() && scores[order[end]] == scores[order[k]]) {
      pos_in_group += static_cast<std::size_t>(truth[order[end]]);
      ++end;
    }
    // Ranks k+1..end share the mid-rank (k+1+end)/2.
    doubled_rank_sum += pos_in_group * (k + 1 + end);
    k = end;
  }
  const double u = static_cast<double>(doubled_rank_sum) / 2.0 -
                   static_cast<double>(n_pos) * static_cast<double>(n_pos + 1) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

EvalReport evaluate_scores(std::span<const double> scores, std::span<const int> predicted,
                           std::span<const int> truth) {
  check_lengths(scores.size(), truth.size());
  EvalReport r;
  r.n_items = truth.size();
  std::tie(r.n_positive, r.n_negative) = class_counts(truth);
  r.accuracy = accuracy(predicted, truth);
  r.confusion = confusion_matrix(predicted, truth);
  r.roc = roc_curve(scores, truth);
  r.auc = auc(r.roc);
  return r;
}

EvalReport evaluate(std::span<const Prediction> predictions, std::span<const int> truth) {
  check_lengths(predictions.size(), truth.size());
  std::vector<double> scores;
  std::vector<int> labels;
  UncertaintySummary u;
  for (const auto& p : predictions) {
    scores.push_back(p.p_mean);
    labels.push_back(p.label);
    u.mean_epistemic_var += p.epistemic_var;
    u.mean_aleatoric_var += p.aleatoric_var;
    u.mean_total_var += p.total_var;
  }
  const double inv = 1.0 / static_cast<double>(predictions.size());
  u.mean_epistemic_var *= inv;
  u.mean_aleatoric_var *= inv;
  u.mean_total_var *= inv;
  EvalReport r = evaluate_scores(scores, labels, truth);
  r.uncertainty = u;
  return r;
}

EvalReport no_skill_baseline(std::span<const int> truth, std::uint64_t seed) {
  if (truth.empty()) fail(ErrorCode::kInsufficientData, "no items to evaluate");
  Rng rng(derive_seed(seed, {0x4E534B4C}));
  std::vector<double> scores(truth.size());
  std::vector<int> labels(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    scores[i] = rng.uniform();
    labels[i] = scores[i] >= 0.5 ? 1 : 0;
  }
  EvalReport r = evaluate_scores(scores, labels, truth);
  r.baseline = true;
  return r;
}

Summary aggregate(std::span<const EvalReport> reports) {
  if (reports.empty()) fail(ErrorCode::kInsufficientData, "no reports to aggregate");
  std::vector<double> acc, area;
  for (const auto& r : reports) {
    acc.push_back(r.accuracy);
    area.push_back(r.auc);
  }
  Summary s;
  s.n = reports.size();
  mean_std(acc, s.mean_accuracy, s.std_accuracy);
  mean_std(area, s.mean_auc, s.std_auc);
  return s;
}

}  // namespace hemobnn
