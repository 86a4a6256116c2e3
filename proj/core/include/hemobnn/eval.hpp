#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hemobnn/predict.hpp"

namespace hemobnn {

struct Confusion {
  std::size_t true_positive = 0;
  std::size_t false_positive = 0;
  std::size_t true_negative = 0;
  std::size_t false_negative = 0;

  std::size_t total() const { return true_positive + false_positive + true_negative + false_negative; }
};

// Points from (0,0) to (1,1). thresholds[i] is the score cut producing point
// i (predict positive when score >= threshold); the first entry is +inf.
struct RocCurve {
  std::vector<double> fpr;
  std::vector<double> tpr;
  std::vector<double> thresholds;

  std::size_t size() const { return fpr.size(); }
};

struct UncertaintySummary {
  double mean_epistemic_var = 0.0;
  double mean_aleatoric_var = 0.0;
  double mean_total_var = 0.0;
};

struct EvalReport {
  double accuracy = 0.0;
  Confusion confusion;
  double auc = 0.0;
  RocCurve roc;
  std::size_t n_items = 0;
  std::size_t n_positive = 0;  // RFT
  std::size_t n_negative = 0;  // LFT
  bool baseline = false;
  std::optional<UncertaintySummary> uncertainty;
};

double accuracy(std::span<const int> predicted, std::span<const int> truth);
Confusion confusion_matrix(std::span<const int> predicted, std::span<const int> truth);

// Sweeps the distinct scores in descending order; tied scores share a point.
RocCurve roc_curve(std::span<const double> scores, std::span<const int> truth);
// Trapezoidal area under the curve.
double auc(const RocCurve& curve);
// Mann-Whitney statistic from mid-ranks (ties count 1/2).
double auc_mann_whitney(std::span<const double> scores, std::span<const int> truth);

// Report for posterior-predictive outputs: scores are p_mean, labels the
// thresholded predictions.
EvalReport evaluate(std::span<const Prediction> predictions, std::span<const int> truth);
EvalReport evaluate_scores(std::span<const double> scores, std::span<const int> predicted,
                           std::span<const int> truth);

// Random classifier: uniform scores on [0,1) from the seeded generator,
// labels = score >= 0.5. The report is flagged as baseline.
EvalReport no_skill_baseline(std::span<const int> truth, std::uint64_t seed);

struct Summary {
  std::size_t n = 0;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // sample standard deviation; 0 for n == 1
  double mean_auc = 0.0;
  double std_auc = 0.0;
};

// Unweighted mean and standard deviation across reports.
Summary aggregate(std::span<const EvalReport> reports);

}  // namespace hemobnn
