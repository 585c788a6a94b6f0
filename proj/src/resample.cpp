#include "hemascreen/resample.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "hemascreen/error.hpp"
#include "hemascreen/rng.hpp"

namespace hemascreen {

std::vector<std::size_t> FoldPlan::test_indices(std::size_t repeat, std::size_t fold) const {
  std::vector<std::size_t> out;
  const auto& a = assignments.at(repeat);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] == static_cast<int>(fold)) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t repeat, std::size_t fold) const {
  std::vector<std::size_t> out;
  const auto& a = assignments.at(repeat);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != static_cast<int>(fold)) out.push_back(i);
  return out;
}

FoldPlan stratified_kfold(const Eigen::Ref<const Eigen::VectorXi>& labels, std::size_t k, std::size_t repeats,
                          std::uint64_t master_seed) {
  if (k < 2) throw Error(ErrorKind::InvalidArgument, "k must be at least 2");
  if (repeats < 1) throw Error(ErrorKind::InvalidArgument, "repeats must be at least 1");

  std::map<int, std::vector<std::size_t>> members;
  for (Eigen::Index i = 0; i < labels.size(); ++i) members[labels(i)].push_back(static_cast<std::size_t>(i));
  if (members.empty()) throw Error(ErrorKind::TooFewPerClass, "no records to split");
  for (const auto& [cls, idx] : members)
    if (idx.size() < k)
      throw Error(ErrorKind::TooFewPerClass, "class " + std::to_string(cls) + " has " + std::to_string(idx.size()) +
                                                 " members, fewer than k = " + std::to_string(k));

  FoldPlan plan;
  plan.k = k;
  plan.repeats = repeats;
  plan.master_seed = master_seed;
  plan.assignments.assign(repeats, std::vector<int>(static_cast<std::size_t>(labels.size()), -1));
  for (std::size_t r = 0; r < repeats; ++r) {
    std::size_t offset = 0;
    for (const auto& [cls, idx] : members) {
      std::vector<std::size_t> order = idx;
      Rng rng(derive_seed(master_seed, {r, static_cast<std::uint64_t>(static_cast<std::int64_t>(cls))}));
      rng.shuffle(std::span<std::size_t>(order));
      for (std::size_t pos = 0; pos < order.size(); ++pos)
        plan.assignments[r][order[pos]] = static_cast<int>((offset + pos) % k);
      offset += order.size();
    }
  }
  return plan;
}

nlohmann::json to_json(const FoldPlan& plan) {
  return {{"schema", "hemascreen.fold_plan/1"},
          {"k", plan.k},
          {"repeats", plan.repeats},
          {"master_seed", plan.master_seed},
          {"assignments", plan.assignments}};
}

FoldPlan fold_plan_from_json(const nlohmann::json& j) {
  if (j.value("schema", "") != "hemascreen.fold_plan/1") throw Error(ErrorKind::InvalidArgument, "not a fold plan");
  FoldPlan plan;
  plan.k = j.at("k").get<std::size_t>();
  plan.repeats = j.at("repeats").get<std::size_t>();
  plan.master_seed = j.at("master_seed").get<std::uint64_t>();
  plan.assignments = j.at("assignments").get<std::vector<std::vector<int>>>();
  if (plan.assignments.size() != plan.repeats) throw Error(ErrorKind::InvalidArgument, "repeat count mismatch");
  return plan;
}

SyntheticBatch smote(const Eigen::Ref<const Eigen::MatrixXd>& minority, std::size_t k_neighbors,
                     std::size_t n_synthetic, std::uint64_t seed) {
  const auto m = static_cast<std::size_t>(minority.rows());
  if (m < 2) throw Error(ErrorKind::TooFewMinority, "SMOTE needs at least two minority samples, got " + std::to_string(m));
  if (k_neighbors < 1 || k_neighbors > m - 1)
    throw Error(ErrorKind::BadNeighborCount,
                "k_neighbors = " + std::to_string(k_neighbors) + " outside [1, " + std::to_string(m - 1) + "]");

  // Neighbour lists, ties in distance resolved by row index.
  std::vector<std::vector<std::size_t>> neighbors(m);
  std::vector<std::pair<double, std::size_t>> dist;
  for (std::size_t i = 0; i < m; ++i) {
    dist.clear();
    for (std::size_t j = 0; j < m; ++j)
      if (j != i)
        dist.emplace_back((minority.row(static_cast<Eigen::Index>(i)) - minority.row(static_cast<Eigen::Index>(j))).squaredNorm(), j);
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_neighbors), dist.end());
    for (std::size_t n = 0; n < k_neighbors; ++n) neighbors[i].push_back(dist[n].second);
  }

  SyntheticBatch batch;
  batch.seed = seed;
  batch.samples.resize(static_cast<Eigen::Index>(n_synthetic), minority.cols());
  Rng rng(seed);
  for (std::size_t s = 0; s < n_synthetic; ++s) {
    const std::size_t base = s % m;
    const std::size_t nn = neighbors[base][rng.index(k_neighbors)];
    const double t = rng.uniform();
    const auto b = static_cast<Eigen::Index>(base);
    batch.samples.row(static_cast<Eigen::Index>(s)) =
        minority.row(b) + t * (minority.row(static_cast<Eigen::Index>(nn)) - minority.row(b));
    batch.parents.emplace_back(base, nn);
    batch.t.push_back(t);
  }
  return batch;
}

std::size_t TrainingSet::synthetic_count() const noexcept {
  return static_cast<std::size_t>(std::count(origin.begin(), origin.end(), kSynthetic));
}

TrainingSet subset(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXi>& y,
                   const std::vector<std::size_t>& indices) {
  TrainingSet out;
  const auto n = static_cast<Eigen::Index>(indices.size());
  out.X.resize(n, X.cols());
  out.y.resize(n);
  out.origin.reserve(indices.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto src = static_cast<Eigen::Index>(indices[static_cast<std::size_t>(i)]);
    out.X.row(i) = X.row(src);
    out.y(i) = y(src);
    out.origin.push_back(static_cast<std::ptrdiff_t>(src));
  }
  return out;
}

TrainingSet balance_training_fold(const TrainingSet& train, std::uint64_t seed, std::size_t k_neighbors) {
  const auto positives = static_cast<std::size_t>(train.y.count());
  const auto negatives = static_cast<std::size_t>(train.y.size()) - positives;
  if (positives == 0 || negatives == 0) throw Error(ErrorKind::SingleClass, "balancing needs both classes");
  if (positives == negatives) return train;

  const int minority_label = positives < negatives ? 1 : 0;
  const std::size_t minority_n = std::min(positives, negatives);
  const std::size_t majority_n = std::max(positives, negatives);
  if (minority_n < 2)
    throw Error(ErrorKind::TooFewMinority, "minority class has " + std::to_string(minority_n) + " member");

  Eigen::MatrixXd minority(static_cast<Eigen::Index>(minority_n), train.X.cols());
  for (Eigen::Index i = 0, r = 0; i < train.y.size(); ++i)
    if (train.y(i) == minority_label) minority.row(r++) = train.X.row(i);

  const SyntheticBatch batch = smote(minority, std::min(k_neighbors, minority_n - 1), majority_n - minority_n, seed);

  TrainingSet out;
  const Eigen::Index n0 = train.X.rows();
  const Eigen::Index extra = batch.samples.rows();
  out.X.resize(n0 + extra, train.X.cols());
  out.X << train.X, batch.samples;
  out.y.resize(n0 + extra);
  out.y << train.y, Eigen::VectorXi::Constant(extra, minority_label);
  out.origin = train.origin;
  if (out.origin.size() != static_cast<std::size_t>(n0)) {
    out.origin.resize(static_cast<std::size_t>(n0));
    std::iota(out.origin.begin(), out.origin.end(), std::ptrdiff_t{0});
  }
  out.origin.resize(static_cast<std::size_t>(n0 + extra), TrainingSet::kSynthetic);
  return out;
}

}  // namespace hemascreen
