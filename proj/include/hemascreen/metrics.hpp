#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include <json.hpp>

#include "hemascreen/error.hpp"

namespace hemascreen {

struct RocPoint {
  double false_positive_rate = 0.0;
  double true_positive_rate = 0.0;
  double threshold = 0.0;  // predict positive iff score >= threshold
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::size_t positives() const noexcept { return tp + fn; }
  std::size_t negatives() const noexcept { return tn + fp; }
};

struct ThresholdMetrics {
  double threshold = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  double accuracy = 0.0;
  Confusion confusion;
  /// Rows are the actual class (0 negative, 1 positive), columns the predicted
  /// class; each row sums to 1.
  Eigen::Matrix2d normalized_confusion = Eigen::Matrix2d::Zero();
};

struct Cutoff {
  double threshold = 0.0;
  double youden_j = 0.0;
};

namespace detail {

template <typename LabelDerived>
std::pair<std::size_t, std::size_t> class_counts(const Eigen::DenseBase<LabelDerived>& labels) {
  std::size_t pos = 0;
  for (Eigen::Index i = 0; i < labels.size(); ++i) pos += labels.derived().coeff(i) != 0;
  const std::size_t neg = static_cast<std::size_t>(labels.size()) - pos;
  if (pos == 0 || neg == 0) throw Error(ErrorKind::SingleClass, "metric needs both classes");
  return {pos, neg};
}

template <typename Derived, typename LabelDerived>
void check_sizes(const Eigen::DenseBase<Derived>& scores, const Eigen::DenseBase<LabelDerived>& labels) {
  if (scores.size() != labels.size()) throw Error(ErrorKind::InvalidArgument, "scores and labels differ in length");
}

/// Indices ordered by descending score.
template <typename Derived>
std::vector<Eigen::Index> descending_order(const Eigen::DenseBase<Derived>& scores) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return scores.derived().coeff(a) > scores.derived().coeff(b); });
  return order;
}

/// Tied scores form one group. Calls f(score, positives_in_group, negatives_in_group)
/// for groups in descending score order.
template <typename Derived, typename LabelDerived, typename F>
void for_each_score_group(const Eigen::DenseBase<Derived>& scores, const Eigen::DenseBase<LabelDerived>& labels, F&& f) {
  const auto order = descending_order(scores);
  for (std::size_t i = 0; i < order.size();) {
    const auto s = scores.derived().coeff(order[i]);
    std::size_t p = 0, n = 0, j = i;
    for (; j < order.size() && scores.derived().coeff(order[j]) == s; ++j)
      (labels.derived().coeff(order[j]) != 0 ? p : n) += 1;
    f(static_cast<double>(s), p, n);
    i = j;
  }
}

}  // namespace detail

/// Mann-Whitney AUC: over all positive/negative pairs, a win counts 1 and a
/// tie 0.5, divided by the number of pairs.
template <typename Derived, typename LabelDerived>
double auc(const Eigen::DenseBase<Derived>& scores, const Eigen::DenseBase<LabelDerived>& labels) {
  detail::check_sizes(scores, labels);
  const auto [P, N] = detail::class_counts(labels);
  // Walk groups from the lowest score up, counting negatives strictly below.
  double wins = 0.0;
  std::size_t negatives_above = 0;
  detail::for_each_score_group(scores, labels, [&](double, std::size_t p, std::size_t n) {
    wins += static_cast<double>(p) * static_cast<double>(N - negatives_above - n) + 0.5 * static_cast<double>(p * n);
    negatives_above += n;
  });
  return wins / (static_cast<double>(P) * static_cast<double>(N));
}

/// Trapezoidal area under a sequence of ROC points.
inline double trapezoid_area(const std::vector<RocPoint>& points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i)
    area += (points[i].false_positive_rate - points[i - 1].false_positive_rate) *
            (points[i].true_positive_rate + points[i - 1].true_positive_rate) / 2.0;
  return area;
}

/// ROC by sweeping the distinct scores in descending order. The curve starts
/// with a +inf sentinel at (0,0) and ends with a -inf sentinel at (1,1), so it
/// has (distinct scores + 2) points; tied scores move the curve in one step.
template <typename Derived, typename LabelDerived>
RocCurve roc_curve(const Eigen::DenseBase<Derived>& scores, const Eigen::DenseBase<LabelDerived>& labels) {
  detail::check_sizes(scores, labels);
  const auto [P, N] = detail::class_counts(labels);
  RocCurve roc;
  roc.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t tp = 0, fp = 0;
  detail::for_each_score_group(scores, labels, [&](double s, std::size_t p, std::size_t n) {
    tp += p;
    fp += n;
    roc.points.push_back({static_cast<double>(fp) / static_cast<double>(N), static_cast<double>(tp) / static_cast<double>(P), s});
  });
  roc.points.push_back({1.0, 1.0, -std::numeric_limits<double>::infinity()});
  roc.auc = trapezoid_area(roc.points);
  return roc;
}

template <typename Derived, typename LabelDerived>
ThresholdMetrics metrics_at(const Eigen::DenseBase<Derived>& scores, const Eigen::DenseBase<LabelDerived>& labels,
                            double threshold) {
  detail::check_sizes(scores, labels);
  const auto [P, N] = detail::class_counts(labels);
  ThresholdMetrics m;
  m.threshold = threshold;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    const bool predicted = static_cast<double>(scores.derived().coeff(i)) >= threshold;
    const bool actual = labels.derived().coeff(i) != 0;
    if (actual) (predicted ? m.confusion.tp : m.confusion.fn) += 1;
    else (predicted ? m.confusion.fp : m.confusion.tn) += 1;
  }
  const auto& c = m.confusion;
  m.sensitivity = static_cast<double>(c.tp) / static_cast<double>(P);
  m.specificity = static_cast<double>(c.tn) / static_cast<double>(N);
  m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(P + N);
  m.normalized_confusion << m.specificity, static_cast<double>(c.fp) / static_cast<double>(N),
      static_cast<double>(c.fn) / static_cast<double>(P), m.sensitivity;
  return m;
}

/// Threshold among the distinct scores maximizing Youden's J; on equal J the
/// lowest threshold wins. J is compared exactly in integer arithmetic.
template <typename Derived, typename LabelDerived>
Cutoff optimal_cutoff(const Eigen::DenseBase<Derived>& scores, const Eigen::DenseBase<LabelDerived>& labels) {
  detail::check_sizes(scores, labels);
  const auto [P, N] = detail::class_counts(labels);
  // J * P * N = tp * N + tn * P - P * N; keep the integer part tp*N + tn*P.
  std::size_t tp = 0, fp = 0;
  std::int64_t best = std::numeric_limits<std::int64_t>::min();
  Cutoff out;
  detail::for_each_score_group(scores, labels, [&](double s, std::size_t p, std::size_t n) {
    tp += p;
    fp += n;
    const auto value = static_cast<std::int64_t>(tp * N + (N - fp) * P);
    if (value >= best) {  // descending sweep: >= keeps the lowest threshold on ties
      best = value;
      out.threshold = s;
    }
  });
  out.youden_j = static_cast<double>(best - static_cast<std::int64_t>(P * N)) / (static_cast<double>(P) * static_cast<double>(N));
  return out;
}

nlohmann::json to_json(const ThresholdMetrics& m);
nlohmann::json to_json(const RocCurve& roc);

}  // namespace hemascreen
