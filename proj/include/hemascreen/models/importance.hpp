#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "hemascreen/models/trained_model.hpp"

namespace hemascreen {

inline constexpr std::size_t kImportancePermutations = 10;

struct ImportanceEntry {
  std::string feature;
  double importance = 0.0;
};

/// Sorted by descending importance, canonical manifest order on ties.
using ImportanceTable = std::vector<ImportanceEntry>;

/// Unnormalized importance per manifest column. Random forests: mean AUC drop
/// over seeded permutations of the column on (X, y), floored at 0. Elastic net:
/// |coefficient| at the selected penalty. Other families throw UnsupportedModel.
std::vector<double> raw_importance(const TrainedModel& model, const Eigen::Ref<const Eigen::MatrixXd>& X,
                                   const Eigen::Ref<const Eigen::VectorXi>& y, std::uint64_t seed,
                                   std::size_t permutations = kImportancePermutations);

/// Scales so the largest value is 100 (all-zero input stays zero) and sorts.
ImportanceTable normalize_importance(const std::vector<std::string>& names, const std::vector<double>& raw);

ImportanceTable variable_importance(const TrainedModel& model, const Eigen::Ref<const Eigen::MatrixXd>& X,
                                    const Eigen::Ref<const Eigen::VectorXi>& y, std::uint64_t seed,
                                    std::size_t permutations = kImportancePermutations);

nlohmann::json to_json(const ImportanceTable& t);

}  // namespace hemascreen
