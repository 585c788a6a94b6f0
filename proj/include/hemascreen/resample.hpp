#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <utility>
#include <vector>

#include <json.hpp>

namespace hemascreen {

/// Stratified k-fold assignment, optionally repeated with fresh shuffles.
struct FoldPlan {
  std::size_t k = 0;
  std::size_t repeats = 0;
  std::uint64_t master_seed = 0;
  /// assignments[repeat][record] is the test fold of that record in that repeat.
  std::vector<std::vector<int>> assignments;

  std::size_t size() const noexcept { return assignments.empty() ? 0 : assignments.front().size(); }
  std::vector<std::size_t> test_indices(std::size_t repeat, std::size_t fold) const;
  std::vector<std::size_t> train_indices(std::size_t repeat, std::size_t fold) const;

  friend bool operator==(const FoldPlan&, const FoldPlan&) = default;
};

/// Per repeat, each class is shuffled with seed derive_seed(master, {repeat,
/// class}) and dealt round-robin over the folds. Each class continues where the
/// previous one stopped, so total fold sizes also differ by at most one.
FoldPlan stratified_kfold(const Eigen::Ref<const Eigen::VectorXi>& labels, std::size_t k, std::size_t repeats,
                          std::uint64_t master_seed);

nlohmann::json to_json(const FoldPlan& plan);
FoldPlan fold_plan_from_json(const nlohmann::json& j);

struct SyntheticBatch {
  Eigen::MatrixXd samples;                                   // one synthetic point per row
  std::vector<std::pair<std::size_t, std::size_t>> parents;  // (base, neighbour) rows of the minority matrix
  std::vector<double> t;                                     // sample = base + t (neighbour - base)
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kDefaultSmoteNeighbors = 5;

/// SMOTE interpolation between minority points and their k nearest minority
/// neighbours (Euclidean). Base points are cycled in row order; the neighbour
/// and t ~ U[0,1) are drawn from the seeded stream.
SyntheticBatch smote(const Eigen::Ref<const Eigen::MatrixXd>& minority, std::size_t k_neighbors,
                     std::size_t n_synthetic, std::uint64_t seed);

/// A labeled design matrix with the provenance of each row. origin[i] is the
/// index of the original record a row came from, or kSynthetic.
struct TrainingSet {
  static constexpr std::ptrdiff_t kSynthetic = -1;

  Eigen::MatrixXd X;
  Eigen::VectorXi y;
  std::vector<std::ptrdiff_t> origin;

  std::size_t synthetic_count() const noexcept;
};

/// Oversamples the minority class of a training portion up to parity with the
/// majority. k_neighbors is clipped to minority_size - 1.
TrainingSet balance_training_fold(const TrainingSet& train, std::uint64_t seed,
                                  std::size_t k_neighbors = kDefaultSmoteNeighbors);

/// Rows of X and y picked by `indices`, origin set to those indices.
TrainingSet subset(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXi>& y,
                   const std::vector<std::size_t>& indices);

}  // namespace hemascreen
