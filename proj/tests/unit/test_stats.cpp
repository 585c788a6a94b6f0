#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hemascreen/error.hpp"
#include "hemascreen/rng.hpp"
#include "hemascreen/stats.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace hemascreen;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

}  // namespace

TEST(RankSum, TwoByTwoExample) {
  const auto r = wilcoxon_rank_sum(vec({1, 2}), vec({3, 4}));
  EXPECT_EQ(r.method, RankSumMethod::Exact);
  EXPECT_DOUBLE_EQ(r.u_statistic, 0.0);
  EXPECT_DOUBLE_EQ(r.w_statistic, 3.0);
  EXPECT_NEAR(r.p_value, 1.0 / 3.0, 1e-15);
}

TEST(RankSum, IdenticalSamples) {
  const auto r = wilcoxon_rank_sum(vec({1, 2, 3}), vec({1, 2, 3}));
  EXPECT_DOUBLE_EQ(r.p_value, 1.0);
  EXPECT_EQ(r.method, RankSumMethod::NormalApprox);  // ties rule out the exact path
}

TEST(RankSum, EmptySample) {
  try {
    wilcoxon_rank_sum(Eigen::VectorXd(0), vec({1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptySample);
  }
}

TEST(RankSum, ExactMatchesEnumerationOracle) {
  Rng rng(1);
  for (std::size_t n = 2; n <= 10; ++n) {
    for (std::size_t n1 = 1; n1 < n; ++n1) {
      for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> values(n);
        std::iota(values.begin(), values.end(), 0.0);
        rng.shuffle(std::span<double>(values));
        Eigen::VectorXd x(static_cast<Eigen::Index>(n1)), y(static_cast<Eigen::Index>(n - n1));
        for (std::size_t i = 0; i < n; ++i)
          (i < n1 ? x(static_cast<Eigen::Index>(i)) : y(static_cast<Eigen::Index>(i - n1))) = values[i] * 1.7 - 3.0;
        const auto r = wilcoxon_rank_sum(x, y);
        ASSERT_EQ(r.method, RankSumMethod::Exact);
        EXPECT_EQ(r.p_value, testkit::enumerated_rank_sum_p(x, y)) << "n1=" << n1 << " n=" << n;
      }
    }
  }
}

TEST(RankSum, ExactAndNormalAgreeAtTen) {
  for (double shift : {0.0, 0.3, 0.7, 1.2, 2.0}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      Rng rng(100 + seed);
      Eigen::VectorXd x(10), y(10);
      for (auto& v : x) v = testkit::standard_normal(rng) + shift;
      for (auto& v : y) v = testkit::standard_normal(rng);
      const auto exact = wilcoxon_rank_sum(x, y, RankSumMethod::Exact);
      const auto normal = wilcoxon_rank_sum(x, y, RankSumMethod::NormalApprox);
      EXPECT_NEAR(exact.p_value, normal.p_value, 0.02) << "shift " << shift << " seed " << seed;
    }
  }
}

TEST(RankSum, Invariants) {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd x(1 + static_cast<Eigen::Index>(rng.index(30))), y(1 + static_cast<Eigen::Index>(rng.index(30)));
    // Coarse values so ties are common.
    for (auto& v : x) v = std::round(rng.uniform(0, 8));
    for (auto& v : y) v = std::round(rng.uniform(0, 8)) - 1;
    const auto xy = wilcoxon_rank_sum(x, y);
    const auto yx = wilcoxon_rank_sum(y, x);
    const double n1n2 = static_cast<double>(x.size() * y.size());
    EXPECT_NEAR(xy.u_statistic + yx.u_statistic, n1n2, 1e-9);
    EXPECT_NEAR(xy.u_statistic, xy.w_statistic - static_cast<double>(x.size() * (x.size() + 1)) / 2.0, 1e-9);
    EXPECT_GE(xy.u_statistic, 0.0);
    EXPECT_LE(xy.u_statistic, n1n2);
    EXPECT_GT(xy.p_value, 0.0);
    EXPECT_LE(xy.p_value, 1.0);
    // Strictly increasing transform of both samples.
    // Scalar std::exp: SIMD exp may round equal inputs differently by lane.
    const auto f = [](double v) { return 3.0 * std::exp(v); };
    const auto tx = wilcoxon_rank_sum(x.unaryExpr(f), y.unaryExpr(f));
    EXPECT_DOUBLE_EQ(tx.p_value, xy.p_value);
  }
}

TEST(RankSum, ForcedExactRejectsTies) {
  EXPECT_THROW(wilcoxon_rank_sum(vec({1, 2}), vec({2, 3}), RankSumMethod::Exact), Error);
}

TEST(MidRanks, TiesShareMean) {
  const auto r = mid_ranks(vec({10, 20, 20, 5}));
  EXPECT_EQ(r, vec({2, 3.5, 3.5, 1}));
}

TEST(BoxSummary, Examples) {
  const auto a = boxplot_summary(vec({1, 2, 3, 4, 5}));
  EXPECT_DOUBLE_EQ(a.median, 3);
  EXPECT_DOUBLE_EQ(a.q1, 2);
  EXPECT_DOUBLE_EQ(a.q3, 4);
  EXPECT_TRUE(a.outliers.empty());
  EXPECT_DOUBLE_EQ(a.whisker_low, 1);
  EXPECT_DOUBLE_EQ(a.whisker_high, 5);

  const auto b = boxplot_summary(vec({7}));
  for (double v : {b.median, b.q1, b.q3, b.whisker_low, b.whisker_high}) EXPECT_DOUBLE_EQ(v, 7);

  // q1 = 2, q3 = 4, upper fence 4 + 1.5 * 2 = 7.
  const auto c = boxplot_summary(vec({1, 2, 3, 4, 100}));
  ASSERT_EQ(c.outliers.size(), 1u);
  EXPECT_DOUBLE_EQ(c.outliers[0], 100);
  EXPECT_DOUBLE_EQ(c.whisker_high, 4);
}

TEST(BoxSummary, InvariantsOnRandomSamples) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd v(1 + static_cast<Eigen::Index>(rng.index(50)));
    for (auto& x : v) x = std::pow(rng.uniform(-2, 2), 3);
    const auto b = boxplot_summary(v);
    EXPECT_LE(b.q1, b.median);
    EXPECT_LE(b.median, b.q3);
    EXPECT_GE(b.whisker_low, v.minCoeff());
    EXPECT_LE(b.whisker_high, v.maxCoeff());
    const double iqr = b.q3 - b.q1;
    for (double o : b.outliers) EXPECT_TRUE(o < b.q1 - 1.5 * iqr || o > b.q3 + 1.5 * iqr);
  }
}

TEST(Quantile, TypeSevenInterpolation) {
  const auto v = vec({4, 1, 3, 2});
  EXPECT_DOUBLE_EQ(quantile(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile(v, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(median(v), 2.5);
  EXPECT_DOUBLE_EQ(quantile(v, 1.0), 4.0);
}

TEST(SignificanceTable, SortedAndDirected) {
  const auto records = testkit::synthetic_records(4, {{{200, 60}, {0, 0}, {0, 0}, {0, 0}}}, 1.5);
  const auto cohort = select_cohort(records, {Location::Community});
  const auto table = significance_table(cohort);
  ASSERT_EQ(table.rows.size(), kFeatureCount);
  for (std::size_t i = 1; i < table.rows.size(); ++i) EXPECT_LE(table.rows[i - 1].p_value, table.rows[i].p_value);
  EXPECT_EQ(table.find("monocytes")->direction, Direction::Increased);
  EXPECT_EQ(table.find("leukocytes")->direction, Direction::Decreased);
  EXPECT_EQ(table.find("eosinophils")->direction, Direction::Decreased);
  EXPECT_LT(table.find("monocytes")->p_value, 0.05);
  EXPECT_GE(table.count_significant(), 4u);
  EXPECT_TRUE(table.neutrophils.has_value());
  EXPECT_EQ(to_json(table).at("rows").size(), kFeatureCount);
}

TEST(SignificanceTable, EqualPKeepsCanonicalOrder) {
  // Every feature identical across records: all p = 1.
  auto records = testkit::synthetic_records(5, {{{4, 4}, {0, 0}, {0, 0}, {0, 0}}});
  for (auto& r : records) r.features.fill(0.25);
  const auto table = significance_table(select_cohort(records, {Location::Community}));
  for (std::size_t i = 0; i < kFeatureCount; ++i) EXPECT_EQ(table.rows[i].feature, feature_names()[i]);
}

TEST(SignificanceTable, SingleClassCohort) {
  const auto records = testkit::synthetic_records(6, {{{10, 0}, {0, 0}, {0, 0}, {0, 0}}});
  try {
    significance_table(select_cohort(records, {Location::Community}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingleClassCohort);
  }
}
