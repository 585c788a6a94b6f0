#include "hemascreen/metrics.hpp"

#include <cmath>

#include "hemascreen/json_eigen.hpp"

namespace hemascreen {

namespace {

// JSON has no infinities; the sentinel thresholds are written as null.
nlohmann::json threshold_json(double t) { return std::isfinite(t) ? nlohmann::json(t) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json to_json(const ThresholdMetrics& m) {
  const auto& c = m.confusion;
  return {{"threshold", threshold_json(m.threshold)},
          {"sensitivity", m.sensitivity},
          {"specificity", m.specificity},
          {"accuracy", m.accuracy},
          {"confusion", {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}}},
          {"normalized_confusion", matrix_to_json(m.normalized_confusion)}};
}

nlohmann::json to_json(const RocCurve& roc) {
  nlohmann::json fpr = nlohmann::json::array(), tpr = nlohmann::json::array(), thr = nlohmann::json::array();
  for (const auto& p : roc.points) {
    fpr.push_back(p.false_positive_rate);
    tpr.push_back(p.true_positive_rate);
    thr.push_back(threshold_json(p.threshold));
  }
  return {{"auc", roc.auc}, {"fpr", fpr}, {"tpr", tpr}, {"thresholds", thr}};
}

}  // namespace hemascreen
