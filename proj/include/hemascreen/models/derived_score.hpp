#pragma once

#include <Eigen/Core>

#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hemascreen/dataset.hpp"

namespace hemascreen {

/// Linear blood-count scores: ml = monocytes - leukocytes, mle additionally
/// subtracts eosinophils, mlep additionally subtracts platelets.
enum class ScoreVariant { Ml, Mle, Mlep };
std::string_view name_of(ScoreVariant v) noexcept;
ScoreVariant score_variant_from_name(std::string_view name);

/// Signed terms of a variant, in the order they are summed.
std::vector<std::pair<Feature, double>> score_terms(ScoreVariant v);

double derived_score(const BloodCountRecord& record, ScoreVariant variant);

/// Scores for every row of an n x 14 canonical feature matrix.
Eigen::VectorXd derived_scores(const Eigen::Ref<const Eigen::MatrixXd>& X, ScoreVariant variant);

inline constexpr double kMaxScalarSlope = 50.0;

struct ScalarLogisticFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t iterations = 0;
  /// The classes are separated by the score, so no finite maximum-likelihood
  /// slope exists; the fit holds a capped-slope boundary at the class gap.
  bool perfect_separation = false;

  double predict_proba(double score) const;
};

/// Newton's method on the two-parameter logistic likelihood; stops when the
/// step norm drops below 1e-10 or after 100 iterations.
ScalarLogisticFit train_logistic_scalar(const Eigen::Ref<const Eigen::VectorXd>& values,
                                        const Eigen::Ref<const Eigen::VectorXi>& labels);

struct DerivedScoreModel {
  ScoreVariant variant = ScoreVariant::Mlep;
  ScalarLogisticFit fit;

  /// X holds only the variant's features, in score_terms order.
  Eigen::VectorXd predict_proba(const Eigen::Ref<const Eigen::MatrixXd>& X) const;
};

nlohmann::json to_json(const DerivedScoreModel& m);
DerivedScoreModel derived_score_from_json(const nlohmann::json& j);

}  // namespace hemascreen
