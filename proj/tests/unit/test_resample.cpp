#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <set>

#include "hemascreen/error.hpp"
#include "hemascreen/resample.hpp"
#include "hemascreen/rng.hpp"

using namespace hemascreen;

namespace {

Eigen::VectorXi labels(std::size_t neg, std::size_t pos) {
  Eigen::VectorXi y(static_cast<Eigen::Index>(neg + pos));
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = (i % 7 == 3 && pos > 0) ? 1 : 0;
  // Top up or trim positives to the exact count, scattered through the vector.
  std::size_t have = static_cast<std::size_t>(y.sum());
  for (Eigen::Index i = 0; i < y.size() && have < pos; ++i)
    if (!y(i)) y(i) = 1, ++have;
  for (Eigen::Index i = y.size() - 1; i >= 0 && have > pos; --i)
    if (y(i)) y(i) = 0, --have;
  return y;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(StratifiedKFold, CommunityCounts) {
  const auto y = labels(431, 39);
  const auto plan = stratified_kfold(y, 10, 1, 42);
  for (std::size_t f = 0; f < 10; ++f) {
    std::size_t pos = 0, neg = 0;
    for (auto i : plan.test_indices(0, f)) (y(static_cast<Eigen::Index>(i)) ? pos : neg) += 1;
    EXPECT_GE(pos, 3u);
    EXPECT_LE(pos, 4u);
    EXPECT_GE(neg, 43u);
    EXPECT_LE(neg, 44u);
  }
}

TEST(StratifiedKFold, TooFewPerClass) {
  EXPECT_EQ(kind_of([] { stratified_kfold(labels(50, 8), 10, 1, 1); }), ErrorKind::TooFewPerClass);
}

TEST(StratifiedKFold, Properties) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng.index(9);
    const std::size_t pos = k + rng.index(40), neg = k + rng.index(200);
    const auto y = labels(neg, pos);
    const std::size_t repeats = 1 + rng.index(3);
    const std::uint64_t seed = rng.next();
    const auto plan = stratified_kfold(y, k, repeats, seed);
    EXPECT_EQ(plan, stratified_kfold(y, k, repeats, seed));
    EXPECT_EQ(to_json(plan).dump(), to_json(stratified_kfold(y, k, repeats, seed)).dump());
    for (std::size_t r = 0; r < repeats; ++r) {
      std::vector<int> seen(static_cast<std::size_t>(y.size()), 0);
      std::size_t min_size = SIZE_MAX, max_size = 0;
      for (std::size_t f = 0; f < k; ++f) {
        const auto test = plan.test_indices(r, f);
        const auto train = plan.train_indices(r, f);
        EXPECT_EQ(test.size() + train.size(), static_cast<std::size_t>(y.size()));
        std::size_t p = 0;
        for (auto i : test) {
          ++seen[i];
          p += y(static_cast<Eigen::Index>(i));
        }
        EXPECT_LT(std::abs(static_cast<double>(p) - static_cast<double>(pos) / static_cast<double>(k)), 1.0);
        EXPECT_LT(std::abs(static_cast<double>(test.size() - p) - static_cast<double>(neg) / static_cast<double>(k)), 1.0);
        min_size = std::min(min_size, test.size());
        max_size = std::max(max_size, test.size());
      }
      EXPECT_LE(max_size - min_size, 1u);
      for (int s : seen) EXPECT_EQ(s, 1);
    }
  }
}

TEST(StratifiedKFold, SeedsAndRepeatsDiffer) {
  const auto y = labels(100, 20);
  const auto a = stratified_kfold(y, 5, 2, 1);
  EXPECT_NE(a.assignments[0], a.assignments[1]);
  EXPECT_NE(a, stratified_kfold(y, 5, 2, 2));
}

TEST(StratifiedKFold, JsonRoundTrip) {
  const auto plan = stratified_kfold(labels(30, 10), 3, 2, 99);
  EXPECT_EQ(fold_plan_from_json(to_json(plan)), plan);
  EXPECT_EQ(to_json(plan).at("schema"), "hemascreen.fold_plan/1");
}

TEST(Smote, SegmentExample) {
  Eigen::MatrixXd minority(2, 2);
  minority << 0, 0, 1, 1;
  const auto batch = smote(minority, 1, 5, 7);
  ASSERT_EQ(batch.samples.rows(), 5);
  for (Eigen::Index i = 0; i < 5; ++i) {
    EXPECT_EQ(batch.samples(i, 0), batch.samples(i, 1));
    EXPECT_GE(batch.samples(i, 0), 0.0);
    EXPECT_LT(batch.samples(i, 0), 1.0);
  }
}

TEST(Smote, IdenticalPointsAndEmptyBatch) {
  Eigen::MatrixXd same(2, 3);
  same << 1, 2, 3, 1, 2, 3;
  const auto batch = smote(same, 1, 4, 1);
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_EQ(batch.samples.row(i), same.row(0));
  EXPECT_EQ(smote(same, 1, 0, 1).samples.rows(), 0);
}

TEST(Smote, Errors) {
  Eigen::MatrixXd one(1, 2);
  one << 1, 2;
  EXPECT_EQ(kind_of([&] { smote(one, 1, 3, 1); }), ErrorKind::TooFewMinority);
  Eigen::MatrixXd three = Eigen::MatrixXd::Random(3, 2);
  EXPECT_EQ(kind_of([&] { smote(three, 3, 3, 1); }), ErrorKind::BadNeighborCount);
  EXPECT_EQ(kind_of([&] { smote(three, 0, 3, 1); }), ErrorKind::BadNeighborCount);
}

TEST(Smote, ConvexCombinationOfNeighbours) {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = static_cast<Eigen::Index>(2 + rng.index(20));
    Eigen::MatrixXd minority(m, 14);
    for (Eigen::Index i = 0; i < minority.size(); ++i) minority.data()[i] = rng.uniform(-3, 3);
    const std::size_t k = 1 + rng.index(static_cast<std::size_t>(m - 1));
    const auto batch = smote(minority, k, 40, rng.next());
    for (Eigen::Index s = 0; s < batch.samples.rows(); ++s) {
      const auto [a, b] = batch.parents[static_cast<std::size_t>(s)];
      EXPECT_EQ(a, static_cast<std::size_t>(s % m));  // round-robin bases
      EXPECT_NE(a, b);
      // b must be among the k nearest neighbours of a.
      const double db = (minority.row(static_cast<Eigen::Index>(b)) - minority.row(static_cast<Eigen::Index>(a))).norm();
      std::size_t closer = 0;
      for (Eigen::Index j = 0; j < m; ++j)
        if (j != static_cast<Eigen::Index>(a) &&
            (minority.row(j) - minority.row(static_cast<Eigen::Index>(a))).norm() < db)
          ++closer;
      EXPECT_LT(closer, k);
      // Solve for t coordinate-wise; every coordinate must agree.
      const Eigen::RowVectorXd base = minority.row(static_cast<Eigen::Index>(a));
      const Eigen::RowVectorXd dir = minority.row(static_cast<Eigen::Index>(b)) - base;
      const double t = batch.t[static_cast<std::size_t>(s)];
      EXPECT_GE(t, 0.0);
      EXPECT_LT(t, 1.0);
      for (Eigen::Index c = 0; c < 14; ++c)
        if (std::abs(dir(c)) > 1e-12) EXPECT_NEAR((batch.samples(s, c) - base(c)) / dir(c), t, 1e-9);
    }
  }
}

TEST(BalanceTrainingFold, ParityAndProvenance) {
  TrainingSet train;
  train.X = Eigen::MatrixXd::Random(423, 14);
  train.y = Eigen::VectorXi::Zero(423);
  train.y.head(35).setOnes();
  const auto out = balance_training_fold(train, 11);
  EXPECT_EQ(out.y.sum(), 388);
  EXPECT_EQ(out.y.size() - out.y.sum(), 388);
  EXPECT_EQ(out.synthetic_count(), 353u);
  for (Eigen::Index i = 0; i < 423; ++i) {
    EXPECT_EQ(out.origin[static_cast<std::size_t>(i)], i);
    EXPECT_EQ(out.X.row(i), train.X.row(i));
  }
  for (std::size_t i = 423; i < out.origin.size(); ++i) {
    EXPECT_EQ(out.origin[i], TrainingSet::kSynthetic);
    EXPECT_EQ(out.y(static_cast<Eigen::Index>(i)), 1);
  }
}

TEST(BalanceTrainingFold, BalancedInputUnchanged) {
  TrainingSet train;
  train.X = Eigen::MatrixXd::Random(10, 3);
  train.y = Eigen::VectorXi::Zero(10);
  train.y.head(5).setOnes();
  const auto out = balance_training_fold(train, 1);
  EXPECT_EQ(out.X, train.X);
  EXPECT_EQ(out.y, train.y);
  EXPECT_EQ(out.synthetic_count(), 0u);
}

TEST(BalanceTrainingFold, SinglePositive) {
  TrainingSet train;
  train.X = Eigen::MatrixXd::Random(10, 3);
  train.y = Eigen::VectorXi::Zero(10);
  train.y(4) = 1;
  EXPECT_EQ(kind_of([&] { balance_training_fold(train, 1); }), ErrorKind::TooFewMinority);
}

TEST(Subset, PicksRowsAndRecordsOrigin) {
  Eigen::MatrixXd X(4, 2);
  X << 0, 1, 2, 3, 4, 5, 6, 7;
  Eigen::VectorXi y(4);
  y << 0, 1, 0, 1;
  const auto s = subset(X, y, {3, 1});
  EXPECT_EQ(s.X.row(0), X.row(3));
  EXPECT_EQ(s.y(1), 1);
  EXPECT_EQ(s.origin, (std::vector<std::ptrdiff_t>{3, 1}));
}
