#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hemascreen/dataset.hpp"
#include "hemascreen/models/ann.hpp"
#include "hemascreen/models/derived_score.hpp"
#include "hemascreen/models/elastic_net.hpp"
#include "hemascreen/models/random_forest.hpp"

namespace hemascreen {

enum class ModelKind { Ann, RandomForest, ElasticNet, LrMl, LrMle, LrMlep };

std::string_view name_of(ModelKind k) noexcept;
ModelKind model_kind_from_name(std::string_view name);
const std::vector<ModelKind>& all_model_kinds();

/// A model family plus its hyperparameters.
struct ModelSpec {
  ModelKind kind = ModelKind::RandomForest;
  AnnConfig ann;
  RandomForestConfig rf;
  ElasticNetConfig glmnet;

  /// Named model with optional hyperparameter overrides, e.g.
  /// from_name("rf", {{"n_trees", 100}}).
  static ModelSpec from_name(std::string_view name, const nlohmann::json& overrides = nlohmann::json::object());

  /// Input columns the family consumes, by canonical feature name.
  std::vector<std::string> manifest() const;
  nlohmann::json hyperparameters() const;
  bool is_derived_score() const noexcept;
};

using ModelVariant = std::variant<ElasticNetModel, RandomForestModel, AnnModel, DerivedScoreModel>;

inline constexpr double kProbabilityFloor = 1e-6;

struct TrainedModel {
  ModelKind kind = ModelKind::RandomForest;
  ModelVariant model;
  std::vector<std::string> manifest;
  std::uint64_t seed = 0;
  nlohmann::json hyperparameters;

  /// Positive-class probability for each row of X (columns in manifest order),
  /// clamped to [1e-6, 1 - 1e-6].
  Eigen::VectorXd predict_proba(const Eigen::Ref<const Eigen::MatrixXd>& X) const;
};

/// Columns of `manifest`, in that order, for every record.
Eigen::MatrixXd design_matrix(std::span<const BloodCountRecord> records, const std::vector<std::string>& manifest);

/// Training rows X must be in spec.manifest() column order.
TrainedModel train_model(const ModelSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& X,
                         const Eigen::Ref<const Eigen::VectorXi>& y, std::uint64_t seed);

using NamedValues = std::vector<std::pair<std::string, double>>;

double predict_proba(const TrainedModel& model, const BloodCountRecord& record);
/// Looks features up by name, so argument order does not matter. Throws
/// ManifestMismatch when a manifest feature is absent.
double predict_proba(const TrainedModel& model, const NamedValues& features);

nlohmann::json to_json(const TrainedModel& m);
TrainedModel trained_model_from_json(const nlohmann::json& j);

}  // namespace hemascreen
