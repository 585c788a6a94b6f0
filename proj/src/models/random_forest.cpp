#include "hemascreen/models/random_forest.hpp"

#include <algorithm>
#include <numeric>

#include "hemascreen/error.hpp"
#include "hemascreen/rng.hpp"

namespace hemascreen {

namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double decrease = -1.0;
};

// n * gini for a node with `pos` positives out of `n`.
double weighted_gini(double pos, double n) {
  if (n <= 0) return 0.0;
  const double p = pos / n;
  return n * 2.0 * p * (1.0 - p);
}

Split best_split_on(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXi>& y,
                    const std::vector<std::size_t>& rows, int feature, std::size_t min_leaf,
                    std::vector<std::pair<double, int>>& scratch) {
  scratch.clear();
  for (auto r : rows) scratch.emplace_back(X(static_cast<Eigen::Index>(r), feature), y(static_cast<Eigen::Index>(r)));
  std::sort(scratch.begin(), scratch.end());

  const double n = static_cast<double>(scratch.size());
  double total_pos = 0;
  for (const auto& s : scratch) total_pos += s.second;
  const double parent = weighted_gini(total_pos, n);

  Split best;
  double left_pos = 0;
  for (std::size_t i = 0; i + 1 < scratch.size(); ++i) {
    left_pos += scratch[i].second;
    const double lo = scratch[i].first, hi = scratch[i + 1].first;
    if (lo == hi) continue;
    const std::size_t n_left = i + 1;
    if (n_left < min_leaf || scratch.size() - n_left < min_leaf) continue;
    const double nl = static_cast<double>(n_left);
    const double decrease = parent - weighted_gini(left_pos, nl) - weighted_gini(total_pos - left_pos, n - nl);
    if (decrease > best.decrease) {
      double mid = lo + (hi - lo) / 2.0;
      if (!(mid < hi)) mid = lo;  // adjacent doubles
      best = {feature, mid, decrease};
    }
  }
  return best;
}

}  // namespace

const TreeNode& DecisionTree::leaf_for(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  const TreeNode* node = &nodes.front();
  while (!node->is_leaf())
    node = &nodes[static_cast<std::size_t>(row(node->feature) <= node->threshold ? node->left : node->right)];
  return *node;
}

std::size_t DecisionTree::depth() const {
  std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
  std::size_t deepest = 0;
  while (!stack.empty()) {
    auto [id, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    const auto& node = nodes[static_cast<std::size_t>(id)];
    if (!node.is_leaf()) {
      stack.emplace_back(node.left, d + 1);
      stack.emplace_back(node.right, d + 1);
    }
  }
  return deepest;
}

double RandomForestModel::predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  double sum = 0.0;
  for (const auto& t : trees) sum += t.predict_proba(row);
  return sum / static_cast<double>(trees.size());
}

Eigen::VectorXd RandomForestModel::predict_proba(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) out(i) = predict_row(X.row(i));
  return out;
}

int RandomForestModel::predict_class(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  int votes = 0;
  for (const auto& t : trees) {
    const double p = t.predict_proba(row);
    votes += p > 0.5 ? 1 : p < 0.5 ? -1 : 0;
  }
  if (votes != 0) return votes > 0;
  return predict_row(row) >= 0.5;
}

DecisionTree grow_tree(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXi>& y,
                       std::vector<std::size_t> sample, const RandomForestConfig& config, std::uint64_t seed) {
  const auto p = static_cast<std::size_t>(X.cols());
  if (config.mtry < 1 || config.mtry > p)
    throw Error(ErrorKind::InvalidArgument, "mtry must lie in [1, " + std::to_string(p) + "]");
  const std::size_t min_leaf = std::max<std::size_t>(config.min_leaf, 1);

  DecisionTree tree;
  tree.seed = seed;
  Rng rng(seed);
  std::vector<int> features(p);
  std::vector<std::pair<double, int>> scratch;

  struct Pending {
    int node;
    std::vector<std::size_t> rows;
  };
  tree.nodes.emplace_back();
  std::vector<Pending> stack;
  stack.push_back({0, std::move(sample)});
  while (!stack.empty()) {
    Pending job = std::move(stack.back());
    stack.pop_back();

    std::size_t pos = 0;
    for (auto r : job.rows) pos += static_cast<std::size_t>(y(static_cast<Eigen::Index>(r)));
    const double p_pos = static_cast<double>(pos) / static_cast<double>(job.rows.size());
    tree.nodes[static_cast<std::size_t>(job.node)].p_positive = p_pos;
    if (pos == 0 || pos == job.rows.size() || job.rows.size() < 2 * min_leaf) continue;

    std::iota(features.begin(), features.end(), 0);
    Split best;
    for (std::size_t drawn = 0; drawn < p; ++drawn) {
      // Partial Fisher-Yates: features[drawn] becomes the next random feature.
      std::swap(features[drawn], features[drawn + rng.index(p - drawn)]);
      const Split s = best_split_on(X, y, job.rows, features[drawn], min_leaf, scratch);
      if (s.feature >= 0 && s.decrease > best.decrease) best = s;
      if (drawn + 1 >= config.mtry && best.feature >= 0) break;
    }
    if (best.feature < 0) continue;

    std::vector<std::size_t> left, right;
    for (auto r : job.rows) (X(static_cast<Eigen::Index>(r), best.feature) <= best.threshold ? left : right).push_back(r);
    const int left_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    TreeNode& node = tree.nodes[static_cast<std::size_t>(job.node)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = left_id;
    node.right = left_id + 1;
    stack.push_back({left_id + 1, std::move(right)});
    stack.push_back({left_id, std::move(left)});
  }
  return tree;
}

RandomForestModel train_random_forest(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXi>& y,
                                      const RandomForestConfig& config, std::uint64_t seed) {
  if (X.rows() == 0) throw Error(ErrorKind::SingleClass, "random forest needs training rows");
  if (config.n_trees < 1) throw Error(ErrorKind::InvalidArgument, "n_trees must be positive");
  if (config.mtry < 1 || config.mtry > static_cast<std::size_t>(X.cols()))
    throw Error(ErrorKind::InvalidArgument, "mtry must lie in [1, " + std::to_string(X.cols()) + "]");

  RandomForestModel model;
  model.config = config;
  model.seed = seed;
  model.n_features = X.cols();
  model.trees.reserve(config.n_trees);
  const auto n = static_cast<std::size_t>(X.rows());
  std::vector<std::size_t> sample(n);
  for (std::size_t t = 0; t < config.n_trees; ++t) {
    const std::uint64_t tree_seed = derive_seed(seed, {t});
    if (config.bootstrap) {
      Rng boot(derive_seed(tree_seed, {0xb0075}));
      for (auto& s : sample) s = boot.index(n);
    } else {
      std::iota(sample.begin(), sample.end(), std::size_t{0});
    }
    model.trees.push_back(grow_tree(X, y, sample, config, tree_seed));
  }
  return model;
}

nlohmann::json to_json(const RandomForestConfig& c) {
  return {{"n_trees", c.n_trees}, {"mtry", c.mtry}, {"min_leaf", c.min_leaf}, {"bootstrap", c.bootstrap}};
}

RandomForestConfig random_forest_config_from_json(const nlohmann::json& j, RandomForestConfig c) {
  for (const auto& [key, value] : j.items()) {
    if (key == "n_trees") c.n_trees = value.get<std::size_t>();
    else if (key == "mtry") c.mtry = value.get<std::size_t>();
    else if (key == "min_leaf") c.min_leaf = value.get<std::size_t>();
    else if (key == "bootstrap") c.bootstrap = value.get<bool>();
    else throw Error(ErrorKind::InvalidArgument, "unknown rf hyperparameter '" + key + "'");
  }
  return c;
}

nlohmann::json to_json(const RandomForestModel& m) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : m.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& node : t.nodes) {
      if (node.is_leaf())
        nodes.push_back({{"leaf", {1.0 - node.p_positive, node.p_positive}}});
      else
        nodes.push_back({{"feature", node.feature}, {"threshold", node.threshold}, {"left", node.left}, {"right", node.right}});
    }
    trees.push_back({{"seed", t.seed}, {"nodes", nodes}});
  }
  return {{"config", to_json(m.config)}, {"seed", m.seed}, {"n_features", m.n_features}, {"trees", trees}};
}

RandomForestModel random_forest_from_json(const nlohmann::json& j) {
  RandomForestModel m;
  m.config = random_forest_config_from_json(j.at("config"));
  m.seed = j.at("seed").get<std::uint64_t>();
  m.n_features = j.at("n_features").get<Eigen::Index>();
  for (const auto& jt : j.at("trees")) {
    DecisionTree t;
    t.seed = jt.at("seed").get<std::uint64_t>();
    for (const auto& jn : jt.at("nodes")) {
      TreeNode node;
      if (jn.contains("leaf")) {
        node.p_positive = jn.at("leaf").at(1).get<double>();
      } else {
        node.feature = jn.at("feature").get<int>();
        node.threshold = jn.at("threshold").get<double>();
        node.left = jn.at("left").get<int>();
        node.right = jn.at("right").get<int>();
        if (node.feature >= m.n_features) throw Error(ErrorKind::InvalidArgument, "tree node feature out of range");
      }
      t.nodes.push_back(node);
    }
    if (t.nodes.empty()) throw Error(ErrorKind::InvalidArgument, "empty tree");
    m.trees.push_back(std::move(t));
  }
  return m;
}

}  // namespace hemascreen
