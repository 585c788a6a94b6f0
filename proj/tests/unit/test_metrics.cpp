#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "hemascreen/error.hpp"
#include "hemascreen/metrics.hpp"
#include "hemascreen/rng.hpp"
#include "oracles.hpp"

using namespace hemascreen;

namespace {

Eigen::VectorXd scores4() {
  Eigen::VectorXd s(4);
  s << 0.1, 0.4, 0.35, 0.8;
  return s;
}
Eigen::VectorXi labels4() {
  Eigen::VectorXi y(4);
  y << 0, 0, 1, 1;
  return y;
}

struct Instance {
  Eigen::VectorXd s;
  Eigen::VectorXi y;
};

Instance random_instance(Rng& rng, bool ties) {
  const auto n = static_cast<Eigen::Index>(2 + rng.index(199));
  Instance in{Eigen::VectorXd(n), Eigen::VectorXi(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    in.y(i) = rng.uniform() < 0.3;
    in.s(i) = ties ? std::round(rng.uniform(0, 6)) / 6.0 : rng.uniform();
  }
  in.y(0) = 1;
  in.y(1) = 0;
  return in;
}

}  // namespace

TEST(Auc, FourPointExample) { EXPECT_DOUBLE_EQ(auc(scores4(), labels4()), 0.75); }

TEST(Auc, PerfectRankingAndAllTies) {
  Eigen::VectorXd s(4);
  s << 0.1, 0.2, 0.8, 0.9;
  EXPECT_DOUBLE_EQ(auc(s, labels4()), 1.0);
  EXPECT_DOUBLE_EQ(auc(Eigen::VectorXd::Constant(4, 0.3), labels4()), 0.5);
}

TEST(Auc, SingleClass) {
  try {
    auc(scores4(), Eigen::VectorXi::Ones(4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingleClass);
  }
}

TEST(Auc, MatchesPairwiseAndTrapezoid) {
  Rng rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto in = random_instance(rng, trial % 2 == 0);
    const double a = auc(in.s, in.y);
    EXPECT_NEAR(a, testkit::pairwise_auc(in.s, in.y), 1e-12);
    const auto roc = roc_curve(in.s, in.y);
    EXPECT_NEAR(a, roc.auc, 1e-12);
    EXPECT_NEAR(roc.auc, trapezoid_area(roc.points), 0.0);
  }
}

TEST(Auc, ComplementAndMonotoneInvariance) {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const auto in = random_instance(rng, false);
    EXPECT_NEAR(auc(in.s, in.y) + auc(Eigen::VectorXd(-in.s), in.y), 1.0, 1e-12);
    const Eigen::VectorXd t = (in.s.array() * 4.0).exp() - 2.0;
    EXPECT_DOUBLE_EQ(auc(t, in.y), auc(in.s, in.y));
    EXPECT_DOUBLE_EQ(optimal_cutoff(t, in.y).youden_j, optimal_cutoff(in.s, in.y).youden_j);
    const auto a = roc_curve(in.s, in.y), b = roc_curve(t, in.y);
    ASSERT_EQ(a.points.size(), b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      EXPECT_EQ(a.points[i].false_positive_rate, b.points[i].false_positive_rate);
      EXPECT_EQ(a.points[i].true_positive_rate, b.points[i].true_positive_rate);
    }
  }
}

TEST(Auc, WorksOnExpressions) {
  const Eigen::VectorXd s = scores4();
  EXPECT_DOUBLE_EQ(auc(2.0 * s.array() + 1.0, labels4()), 0.75);
  const Eigen::VectorXf f = s.cast<float>();
  EXPECT_DOUBLE_EQ(auc(f, labels4()), 0.75);
}

TEST(RocCurve, FourPointSweep) {
  const auto roc = roc_curve(scores4(), labels4());
  const std::vector<std::pair<double, double>> expected{{0, 0}, {0, 0.5}, {0.5, 0.5}, {0.5, 1}, {1, 1}, {1, 1}};
  ASSERT_EQ(roc.points.size(), 6u);  // four distinct scores plus two sentinels
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_DOUBLE_EQ(roc.points[i].false_positive_rate, expected[i].first);
    EXPECT_DOUBLE_EQ(roc.points[i].true_positive_rate, expected[i].second);
  }
  EXPECT_DOUBLE_EQ(roc.auc, 0.75);
  EXPECT_TRUE(std::isinf(roc.points.front().threshold));
  EXPECT_DOUBLE_EQ(roc.points[1].threshold, 0.8);
}

TEST(RocCurve, PerfectRanking) {
  Eigen::VectorXd s(4);
  s << 0.1, 0.2, 0.8, 0.9;
  const auto roc = roc_curve(s, labels4());
  // Distinct geometric vertices: (0,0) -> (0,1) -> (1,1).
  std::vector<std::pair<double, double>> vertices;
  for (const auto& p : roc.points)
    if (vertices.empty() || vertices.back() != std::make_pair(p.false_positive_rate, p.true_positive_rate))
      vertices.emplace_back(p.false_positive_rate, p.true_positive_rate);
  const std::vector<std::pair<double, double>> corners{{0, 0}, {0, 0.5}, {0, 1}, {0.5, 1}, {1, 1}};
  EXPECT_EQ(vertices, corners);
  EXPECT_DOUBLE_EQ(roc.auc, 1.0);
}

TEST(RocCurve, Properties) {
  Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const auto in = random_instance(rng, trial % 2 == 1);
    const auto roc = roc_curve(in.s, in.y);
    std::set<double> distinct(in.s.begin(), in.s.end());
    EXPECT_EQ(roc.points.size(), distinct.size() + 2);
    EXPECT_EQ(roc.points.front().false_positive_rate, 0.0);
    EXPECT_EQ(roc.points.front().true_positive_rate, 0.0);
    EXPECT_EQ(roc.points.back().false_positive_rate, 1.0);
    EXPECT_EQ(roc.points.back().true_positive_rate, 1.0);
    for (std::size_t i = 1; i < roc.points.size(); ++i) {
      EXPECT_GE(roc.points[i].false_positive_rate, roc.points[i - 1].false_positive_rate);
      EXPECT_GE(roc.points[i].true_positive_rate, roc.points[i - 1].true_positive_rate);
    }
  }
}

TEST(MetricsAt, FourPointExampleAtPointFour) {
  const auto m = metrics_at(scores4(), labels4(), 0.4);
  EXPECT_EQ(m.confusion.tp, 1u);
  EXPECT_EQ(m.confusion.fn, 1u);
  EXPECT_EQ(m.confusion.tn, 1u);
  EXPECT_EQ(m.confusion.fp, 1u);
  EXPECT_DOUBLE_EQ(m.accuracy, 0.5);
}

TEST(MetricsAt, ExtremeThresholds) {
  const auto low = metrics_at(scores4(), labels4(), 0.1);
  EXPECT_DOUBLE_EQ(low.sensitivity, 1.0);
  EXPECT_DOUBLE_EQ(low.specificity, 0.0);
  const auto high = metrics_at(scores4(), labels4(), 0.81);
  EXPECT_DOUBLE_EQ(high.sensitivity, 0.0);
  EXPECT_DOUBLE_EQ(high.specificity, 1.0);
}

TEST(MetricsAt, TypeInvariants) {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto in = random_instance(rng, trial % 2 == 0);
    const auto m = metrics_at(in.s, in.y, rng.uniform());
    const auto P = static_cast<std::size_t>(in.y.sum()), N = static_cast<std::size_t>(in.y.size()) - P;
    EXPECT_EQ(m.confusion.positives(), P);
    EXPECT_EQ(m.confusion.negatives(), N);
    EXPECT_DOUBLE_EQ(m.sensitivity, static_cast<double>(m.confusion.tp) / static_cast<double>(P));
    EXPECT_DOUBLE_EQ(m.specificity, static_cast<double>(m.confusion.tn) / static_cast<double>(N));
    EXPECT_DOUBLE_EQ(m.accuracy, static_cast<double>(m.confusion.tp + m.confusion.tn) / static_cast<double>(P + N));
    EXPECT_NEAR(m.normalized_confusion.row(0).sum(), 1.0, 1e-15);
    EXPECT_NEAR(m.normalized_confusion.row(1).sum(), 1.0, 1e-15);
  }
}

TEST(OptimalCutoff, Examples) {
  const auto c = optimal_cutoff(scores4(), labels4());
  EXPECT_DOUBLE_EQ(c.threshold, 0.35);
  EXPECT_DOUBLE_EQ(c.youden_j, 0.5);

  Eigen::VectorXd perfect(4);
  perfect << 0.1, 0.2, 0.8, 0.9;
  const auto p = optimal_cutoff(perfect, labels4());
  EXPECT_DOUBLE_EQ(p.threshold, 0.8);
  EXPECT_DOUBLE_EQ(p.youden_j, 1.0);

  const auto flat = optimal_cutoff(Eigen::VectorXd::Constant(4, 0.6), labels4());
  EXPECT_DOUBLE_EQ(flat.threshold, 0.6);
  EXPECT_DOUBLE_EQ(flat.youden_j, 0.0);
}

TEST(OptimalCutoff, MatchesEnumeration) {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const auto in = random_instance(rng, trial % 2 == 0);
    double best_j = -2, best_t = 0;
    std::set<double> candidates(in.s.begin(), in.s.end());
    for (double t : candidates) {  // ascending, so strict > keeps the lowest
      const auto m = metrics_at(in.s, in.y, t);
      const double j = m.sensitivity + m.specificity - 1.0;
      if (j > best_j + 1e-12) best_j = j, best_t = t;
    }
    const auto c = optimal_cutoff(in.s, in.y);
    EXPECT_NEAR(c.youden_j, best_j, 1e-12);
    EXPECT_EQ(c.threshold, best_t);
  }
}

TEST(MetricsJson, SentinelsAreNull) {
  const auto j = to_json(roc_curve(scores4(), labels4()));
  EXPECT_TRUE(j.at("thresholds").front().is_null());
  EXPECT_TRUE(j.at("thresholds").back().is_null());
  EXPECT_EQ(j.at("fpr").size(), 6u);
  const auto m = to_json(metrics_at(scores4(), labels4(), 0.4));
  EXPECT_EQ(m.at("confusion").at("tp"), 1);
  EXPECT_EQ(m.at("normalized_confusion").size(), 2u);
}
