#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hemascreen/dataset.hpp"

namespace hemascreen {

enum class RankSumMethod { Exact, NormalApprox };

struct RankSumResult {
  double w_statistic = 0.0;  // rank sum of the first sample (mid-ranks)
  double u_statistic = 0.0;  // W - n1(n1+1)/2
  double p_value = 1.0;      // two-sided
  RankSumMethod method = RankSumMethod::Exact;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

/// Samples with at most this many observations in total and no ties use the
/// exact null distribution.
inline constexpr std::size_t kExactRankSumLimit = 20;

/// Two-sided Wilcoxon rank-sum (Mann-Whitney) test of x against y.
///
/// Exact p by enumerating the null distribution of U when n1+n2 <= 20 and
/// there are no ties. Otherwise the normal approximation with tie-corrected
/// variance and a 0.5 continuity correction. `force` selects a method
/// explicitly; forcing Exact on tied data throws InvalidArgument.
RankSumResult wilcoxon_rank_sum(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                                std::optional<RankSumMethod> force = std::nullopt);

/// Mid-ranks (1-based) of `values`; tied values share the mean of their ranks.
Eigen::VectorXd mid_ranks(const Eigen::Ref<const Eigen::VectorXd>& values);

/// Linear interpolation between order statistics at 1 + (n-1)q ("type 7").
double quantile(const Eigen::Ref<const Eigen::VectorXd>& values, double q);
double median(const Eigen::Ref<const Eigen::VectorXd>& values);

struct BoxSummary {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double whisker_low = 0.0;
  double whisker_high = 0.0;
  std::vector<double> outliers;
  std::size_t n = 0;
};

/// Tukey box: whiskers reach the most extreme points inside q1 - 1.5 IQR and
/// q3 + 1.5 IQR; anything beyond is an outlier. Empty input gives n == 0.
BoxSummary boxplot_summary(const Eigen::Ref<const Eigen::VectorXd>& values);

enum class Direction { Decreased = -1, Unchanged = 0, Increased = 1 };
std::string_view name_of(Direction d) noexcept;

struct SignificanceRow {
  std::string feature;
  Direction direction = Direction::Unchanged;  // sign(median positive - median negative)
  double p_value = 1.0;
  double median_positive = 0.0;
  double median_negative = 0.0;
  RankSumResult test;
};

struct SignificanceTable {
  /// One row per modeled feature, ascending p; equal p keeps canonical feature order.
  std::vector<SignificanceRow> rows;
  /// Neutrophils are not modeled; screened separately when both classes report them.
  std::optional<SignificanceRow> neutrophils;

  std::size_t count_significant(double alpha = 0.05) const;
  const SignificanceRow* find(std::string_view feature) const;
};

/// Rank-sum screen of every feature, positives against negatives.
SignificanceTable significance_table(const Cohort& cohort);

/// Rank-sum comparison of an arbitrary per-record score, positives vs negatives.
SignificanceRow screen_values(std::string name, const Eigen::Ref<const Eigen::VectorXd>& values,
                              const Eigen::Ref<const Eigen::VectorXi>& labels);

nlohmann::json to_json(const RankSumResult& r);
nlohmann::json to_json(const BoxSummary& b);
nlohmann::json to_json(const SignificanceRow& row);
nlohmann::json to_json(const SignificanceTable& table);

}  // namespace hemascreen
