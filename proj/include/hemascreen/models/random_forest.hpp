#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include <json.hpp>

namespace hemascreen {

struct RandomForestConfig {
  std::size_t n_trees = 500;
  std::size_t mtry = 3;  // floor(sqrt(14))
  std::size_t min_leaf = 1;
  /// Grow each tree on a bootstrap sample; off means every tree sees all rows once.
  bool bootstrap = true;
};

/// Internal nodes send a row left iff row[feature] <= threshold. Leaves have
/// feature == -1 and carry the positive-class fraction of their samples.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double p_positive = 0.0;

  bool is_leaf() const noexcept { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::uint64_t seed = 0;

  const TreeNode& leaf_for(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
  double predict_proba(const Eigen::Ref<const Eigen::RowVectorXd>& row) const { return leaf_for(row).p_positive; }
  std::size_t depth() const;
};

struct RandomForestModel {
  std::vector<DecisionTree> trees;
  RandomForestConfig config;
  std::uint64_t seed = 0;
  Eigen::Index n_features = 0;

  /// Mean of the leaf probabilities.
  double predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
  Eigen::VectorXd predict_proba(const Eigen::Ref<const Eigen::MatrixXd>& X) const;
  /// Majority vote of the per-tree classes (leaf p > 0.5 votes positive,
  /// p < 0.5 negative, 0.5 abstains). A tied vote falls back to predict_row >= 0.5.
  int predict_class(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
};

/// Grows a single tree on the rows listed in `sample` (repeats allowed). Splits
/// maximize the Gini decrease over `mtry` randomly drawn features, drawing
/// further features only when none of the first mtry admits a split.
DecisionTree grow_tree(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXi>& y,
                       std::vector<std::size_t> sample, const RandomForestConfig& config, std::uint64_t seed);

/// Tree t is grown with seed derive_seed(seed, {t}), so trees are independent
/// units of work. A single-class training set yields single-leaf trees.
RandomForestModel train_random_forest(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXi>& y,
                                      const RandomForestConfig& config, std::uint64_t seed);

nlohmann::json to_json(const RandomForestConfig& c);
RandomForestConfig random_forest_config_from_json(const nlohmann::json& j, RandomForestConfig base = {});
nlohmann::json to_json(const RandomForestModel& m);
RandomForestModel random_forest_from_json(const nlohmann::json& j);

}  // namespace hemascreen
