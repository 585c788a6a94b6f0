#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hemascreen/dataset.hpp"
#include "hemascreen/metrics.hpp"
#include "hemascreen/models/importance.hpp"
#include "hemascreen/models/trained_model.hpp"
#include "hemascreen/resample.hpp"

namespace hemascreen {

struct FoldResult {
  std::size_t repeat = 0;
  std::size_t fold = 0;
  std::uint64_t model_seed = 0;
  std::size_t n_train = 0;      // original training records
  std::size_t n_synthetic = 0;  // SMOTE rows added to the training portion
  std::vector<std::string> test_ids;
  double auc = 0.0;
  /// Youden cutoff chosen on the training-portion scores.
  Cutoff cutoff;
  ThresholdMetrics at_cutoff;
  ThresholdMetrics at_half;
  RocCurve roc;
  /// Raw held-out importance per manifest column, when requested.
  std::vector<double> importance;
};

struct MetricSummary {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation; 0 for a single fold
  double min = 0.0;
  double max = 0.0;
};

MetricSummary summarize(const std::vector<double>& values);

struct EvalOptions {
  bool smote = false;
  std::size_t threads = 1;
  bool importance = false;
};

struct EvalReport {
  std::string model;
  std::vector<std::string> manifest;
  nlohmann::json hyperparameters;
  std::uint64_t master_seed = 0;
  std::size_t k = 0;
  std::size_t repeats = 0;
  bool smote = false;
  std::string cohort_filter;
  std::string cohort_digest;
  std::size_t n_records = 0;
  std::size_t n_positive = 0;
  std::vector<FoldResult> folds;  // repeat-major, fold-minor

  /// Metric names: auc, sensitivity, specificity, accuracy (at the training
  /// cutoff) and sensitivity_at_0_5, specificity_at_0_5, accuracy_at_0_5.
  MetricSummary aggregate(const std::string& metric) const;
  std::vector<double> fold_values(const std::string& metric) const;
  /// Held-out importance averaged over folds, then normalized; empty unless requested.
  ImportanceTable importance() const;
  /// Fold with the lowest AUC (earliest on ties).
  const FoldResult& worst_fold() const;
};

const std::vector<std::string>& report_metric_names();

/// Trains and scores `spec` on every fold of `plan`. Seeds per fold are derived
/// from the plan's master seed, so the report is independent of `threads`.
EvalReport cross_validate(const Cohort& cohort, const ModelSpec& spec, const FoldPlan& plan,
                          const EvalOptions& options = {});

nlohmann::json to_json(const FoldResult& f);
nlohmann::json to_json(const EvalReport& r);

}  // namespace hemascreen
