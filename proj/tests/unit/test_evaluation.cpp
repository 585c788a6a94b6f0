#include <gtest/gtest.h>

#include <set>

#include "hemascreen/error.hpp"
#include "hemascreen/evaluation.hpp"
#include "synthetic.hpp"

using namespace hemascreen;

namespace {

Cohort community(std::uint64_t seed = 1) {
  static const auto records = testkit::synthetic_records(seed, {{{120, 20}, {0, 0}, {0, 0}, {0, 0}}});
  auto c = select_cohort(records, {Location::Community}, "digest");
  c.provenance.filter = "community";
  return c;
}

}  // namespace

TEST(CrossValidate, FoldCountAndAggregates) {
  const auto c = community();
  const auto plan = stratified_kfold(label_vector(c.records), 5, 2, 42);
  const auto report = cross_validate(c, ModelSpec::from_name("lr-mlep"), plan);
  EXPECT_EQ(report.folds.size(), 10u);
  for (const auto& m : report_metric_names()) {
    const auto s = report.aggregate(m);
    EXPECT_GE(s.mean, s.min);
    EXPECT_LE(s.mean, s.max);
    EXPECT_GE(s.sd, 0.0);
  }
  EXPECT_GT(report.aggregate("auc").mean, 0.7);
  const auto j = to_json(report);
  EXPECT_EQ(j.at("schema"), "hemascreen.eval_report/1");
  EXPECT_EQ(j.at("master_seed"), 42);
  EXPECT_EQ(j.at("folds").size(), 10u);
}

TEST(CrossValidate, TestFoldsHoldOnlyOriginalRecords) {
  const auto c = community();
  std::set<std::string> ids;
  for (const auto& r : c.records) ids.insert(r.patient_id);
  const auto plan = stratified_kfold(label_vector(c.records), 4, 1, 7);
  const auto report = cross_validate(c, ModelSpec::from_name("rf", {{"n_trees", 20}}), plan, {.smote = true});
  std::multiset<std::string> tested;
  for (const auto& f : report.folds) {
    EXPECT_GT(f.n_synthetic, 0u);
    for (const auto& id : f.test_ids) {
      EXPECT_TRUE(ids.count(id)) << id;
      tested.insert(id);
    }
    EXPECT_EQ(f.n_train + f.test_ids.size(), c.size());
  }
  EXPECT_EQ(tested.size(), c.size());
  for (const auto& id : ids) EXPECT_EQ(tested.count(id), 1u);
}

TEST(CrossValidate, ThreadCountDoesNotChangeReport) {
  const auto c = community();
  const auto plan = stratified_kfold(label_vector(c.records), 5, 1, 3);
  const auto spec = ModelSpec::from_name("rf", {{"n_trees", 15}});
  const auto serial = to_json(cross_validate(c, spec, plan, {.smote = true, .threads = 1})).dump();
  const auto parallel = to_json(cross_validate(c, spec, plan, {.smote = true, .threads = 3})).dump();
  EXPECT_EQ(serial, parallel);
}

TEST(CrossValidate, CutoffComesFromTrainingScores) {
  const auto c = community();
  const auto plan = stratified_kfold(label_vector(c.records), 5, 1, 5);
  const auto spec = ModelSpec::from_name("lr-ml");
  const auto report = cross_validate(c, spec, plan);
  const auto& f = report.folds[2];
  const auto train_idx = plan.train_indices(0, 2);
  std::vector<BloodCountRecord> train;
  for (auto i : train_idx) train.push_back(c.records[i]);
  const Eigen::MatrixXd X = design_matrix(train, spec.manifest());
  const auto model = train_model(spec, X, label_vector(train), f.model_seed);
  const auto expected = optimal_cutoff(model.predict_proba(X), label_vector(train));
  EXPECT_EQ(f.cutoff.threshold, expected.threshold);
  EXPECT_EQ(f.at_cutoff.threshold, expected.threshold);
  EXPECT_EQ(f.at_half.threshold, 0.5);
}

TEST(CrossValidate, FailuresNameModelAndFold) {
  const auto c = community();
  const auto plan = stratified_kfold(label_vector(c.records), 5, 1, 5);
  auto spec = ModelSpec::from_name("ann");
  spec.ann.learning_rate = std::numeric_limits<double>::infinity();
  spec.ann.epochs = 2;
  try {
    cross_validate(c, spec, plan);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonFinite);
    EXPECT_NE(std::string(e.what()).find("ann, repeat 0, fold 0"), std::string::npos) << e.what();
  }
}

TEST(CrossValidate, PlanMustMatchCohort) {
  const auto c = community();
  Eigen::VectorXi y = Eigen::VectorXi::Zero(20);
  y.head(10).setOnes();
  EXPECT_THROW(cross_validate(c, ModelSpec::from_name("lr-ml"), stratified_kfold(y, 2, 1, 1)), Error);
}

TEST(CrossValidate, HeldOutImportance) {
  const auto c = community();
  const auto plan = stratified_kfold(label_vector(c.records), 4, 1, 9);
  const auto report = cross_validate(c, ModelSpec::from_name("rf", {{"n_trees", 30}}), plan, {.importance = true});
  const auto table = report.importance();
  ASSERT_EQ(table.size(), 14u);
  EXPECT_DOUBLE_EQ(table.front().importance, 100.0);
  std::set<std::string> top;
  for (std::size_t i = 0; i < 5; ++i) top.insert(table[i].feature);
  EXPECT_TRUE(top.count("leukocytes") || top.count("monocytes") || top.count("eosinophils"));
  EXPECT_TRUE(to_json(report).contains("importance"));
}

TEST(Summarize, SampleStandardDeviation) {
  const auto s = summarize({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.sd, 1.2909944487358056, 1e-15);
  EXPECT_EQ(s.min, 1.0);
  EXPECT_EQ(s.max, 4.0);
  EXPECT_EQ(summarize({0.7}).sd, 0.0);
}
