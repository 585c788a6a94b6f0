#include "hemascreen/models/importance.hpp"

#include <algorithm>
#include <numeric>

#include "hemascreen/error.hpp"
#include "hemascreen/metrics.hpp"
#include "hemascreen/rng.hpp"

namespace hemascreen {

std::vector<double> raw_importance(const TrainedModel& model, const Eigen::Ref<const Eigen::MatrixXd>& X,
                                   const Eigen::Ref<const Eigen::VectorXi>& y, std::uint64_t seed,
                                   std::size_t permutations) {
  if (const auto* net = std::get_if<ElasticNetModel>(&model.model)) {
    std::vector<double> out(static_cast<std::size_t>(net->coefficients.size()));
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::abs(net->coefficients(static_cast<Eigen::Index>(j)));
    return out;
  }
  if (!std::holds_alternative<RandomForestModel>(model.model))
    throw Error(ErrorKind::UnsupportedModel,
                "variable importance is defined for rf and glmnet, not " + std::string(name_of(model.kind)));
  if (permutations == 0) throw Error(ErrorKind::InvalidArgument, "permutations must be positive");

  const double baseline = auc(model.predict_proba(X), y);
  std::vector<double> out(static_cast<std::size_t>(X.cols()), 0.0);
  Eigen::MatrixXd shuffled = X;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    double drop = 0.0;
    for (std::size_t r = 0; r < permutations; ++r) {
      std::iota(order.begin(), order.end(), Eigen::Index{0});
      Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(j), r}));
      rng.shuffle(std::span<Eigen::Index>(order));
      for (Eigen::Index i = 0; i < X.rows(); ++i) shuffled(i, j) = X(order[static_cast<std::size_t>(i)], j);
      drop += baseline - auc(model.predict_proba(shuffled), y);
    }
    shuffled.col(j) = X.col(j);
    out[static_cast<std::size_t>(j)] = std::max(0.0, drop / static_cast<double>(permutations));
  }
  return out;
}

ImportanceTable normalize_importance(const std::vector<std::string>& names, const std::vector<double>& raw) {
  if (names.size() != raw.size()) throw Error(ErrorKind::InvalidArgument, "importance names and values differ in length");
  const double top = raw.empty() ? 0.0 : *std::max_element(raw.begin(), raw.end());
  ImportanceTable table;
  for (std::size_t j = 0; j < raw.size(); ++j) table.push_back({names[j], top > 0.0 ? raw[j] / top * 100.0 : 0.0});
  std::stable_sort(table.begin(), table.end(), [](const auto& a, const auto& b) { return a.importance > b.importance; });
  return table;
}

ImportanceTable variable_importance(const TrainedModel& model, const Eigen::Ref<const Eigen::MatrixXd>& X,
                                    const Eigen::Ref<const Eigen::VectorXi>& y, std::uint64_t seed,
                                    std::size_t permutations) {
  return normalize_importance(model.manifest, raw_importance(model, X, y, seed, permutations));
}

nlohmann::json to_json(const ImportanceTable& t) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : t) out.push_back({{"feature", e.feature}, {"importance", e.importance}});
  return out;
}

}  // namespace hemascreen
