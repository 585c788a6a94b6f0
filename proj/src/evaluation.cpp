#include "hemascreen/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_set>

#include "hemascreen/error.hpp"
#include "hemascreen/rng.hpp"

namespace hemascreen {

namespace {

constexpr std::string_view kReportSchema = "hemascreen.eval_report/1";
constexpr std::uint64_t kModelStream = 0x6d6f64656cULL;
constexpr std::uint64_t kSmoteStream = 0x736d6f7465ULL;
constexpr std::uint64_t kImportanceStream = 0x696d70ULL;

double metric_value(const FoldResult& f, const std::string& metric) {
  if (metric == "auc") return f.auc;
  if (metric == "sensitivity") return f.at_cutoff.sensitivity;
  if (metric == "specificity") return f.at_cutoff.specificity;
  if (metric == "accuracy") return f.at_cutoff.accuracy;
  if (metric == "sensitivity_at_0_5") return f.at_half.sensitivity;
  if (metric == "specificity_at_0_5") return f.at_half.specificity;
  if (metric == "accuracy_at_0_5") return f.at_half.accuracy;
  throw Error(ErrorKind::InvalidArgument, "unknown metric '" + metric + "'");
}

void validate_plan(const FoldPlan& plan, const Eigen::VectorXi& y) {
  if (plan.size() != static_cast<std::size_t>(y.size()))
    throw Error(ErrorKind::InvalidArgument, "fold plan covers " + std::to_string(plan.size()) + " records, cohort has " +
                                                std::to_string(y.size()));
  for (std::size_t r = 0; r < plan.repeats; ++r)
    for (std::size_t f = 0; f < plan.k; ++f) {
      std::size_t pos = 0, total = 0;
      for (auto i : plan.test_indices(r, f)) {
        pos += y(static_cast<Eigen::Index>(i)) != 0;
        ++total;
      }
      if (pos == 0 || pos == total)
        throw Error(ErrorKind::TooFewPerClass,
                    "repeat " + std::to_string(r) + ", fold " + std::to_string(f) + " has a single-class test set");
    }
}

FoldResult run_fold(const Cohort& cohort, const ModelSpec& spec, const FoldPlan& plan, const Eigen::MatrixXd& X,
                    const Eigen::VectorXi& y, std::size_t repeat, std::size_t fold, const EvalOptions& options) {
  FoldResult out;
  out.repeat = repeat;
  out.fold = fold;
  out.model_seed = derive_seed(plan.master_seed, {kModelStream, repeat, fold});

  const auto test = plan.test_indices(repeat, fold);
  const auto train_idx = plan.train_indices(repeat, fold);
  TrainingSet train = subset(X, y, train_idx);
  out.n_train = train_idx.size();
  if (options.smote) train = balance_training_fold(train, derive_seed(plan.master_seed, {kSmoteStream, repeat, fold}));
  out.n_synthetic = train.synthetic_count();

  // Test rows come straight from the cohort; no training row may share an origin.
  const std::unordered_set<std::size_t> test_set(test.begin(), test.end());
  for (auto o : train.origin)
    if (o != TrainingSet::kSynthetic && test_set.count(static_cast<std::size_t>(o)))
      throw Error(ErrorKind::InvalidArgument, "record " + cohort.records[static_cast<std::size_t>(o)].patient_id +
                                                  " is in both the training and the test portion");
  for (auto i : test) out.test_ids.push_back(cohort.records[i].patient_id);

  const TrainedModel model = train_model(spec, train.X, train.y, out.model_seed);

  // Cutoff from the original (non-synthetic) training records only.
  const TrainingSet original = subset(X, y, train_idx);
  out.cutoff = optimal_cutoff(model.predict_proba(original.X), original.y);

  const TrainingSet held_out = subset(X, y, test);
  const Eigen::VectorXd scores = model.predict_proba(held_out.X);
  out.auc = auc(scores, held_out.y);
  out.roc = roc_curve(scores, held_out.y);
  out.at_cutoff = metrics_at(scores, held_out.y, out.cutoff.threshold);
  out.at_half = metrics_at(scores, held_out.y, 0.5);
  if (options.importance)
    out.importance = raw_importance(model, held_out.X, held_out.y,
                                    derive_seed(plan.master_seed, {kImportanceStream, repeat, fold}));
  return out;
}

}  // namespace

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary s;
  if (values.empty()) return s;
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  // Rounding in the sum can push the mean a hair outside the fold range.
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

const std::vector<std::string>& report_metric_names() {
  static const std::vector<std::string> names{"auc",         "sensitivity",        "specificity",       "accuracy",
                                              "sensitivity_at_0_5", "specificity_at_0_5", "accuracy_at_0_5"};
  return names;
}

std::vector<double> EvalReport::fold_values(const std::string& metric) const {
  std::vector<double> out;
  for (const auto& f : folds) out.push_back(metric_value(f, metric));
  return out;
}

MetricSummary EvalReport::aggregate(const std::string& metric) const { return summarize(fold_values(metric)); }

ImportanceTable EvalReport::importance() const {
  if (folds.empty() || folds.front().importance.empty()) return {};
  std::vector<double> mean(manifest.size(), 0.0);
  for (const auto& f : folds)
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += f.importance[j] / static_cast<double>(folds.size());
  return normalize_importance(manifest, mean);
}

const FoldResult& EvalReport::worst_fold() const {
  if (folds.empty()) throw Error(ErrorKind::InvalidArgument, "report has no folds");
  return *std::min_element(folds.begin(), folds.end(), [](const auto& a, const auto& b) { return a.auc < b.auc; });
}

EvalReport cross_validate(const Cohort& cohort, const ModelSpec& spec, const FoldPlan& plan, const EvalOptions& options) {
  EvalReport report;
  report.model = std::string(name_of(spec.kind));
  report.manifest = spec.manifest();
  report.hyperparameters = spec.hyperparameters();
  report.master_seed = plan.master_seed;
  report.k = plan.k;
  report.repeats = plan.repeats;
  report.smote = options.smote;
  report.cohort_filter = cohort.provenance.filter;
  report.cohort_digest = cohort.provenance.source_digest;
  report.n_records = cohort.size();
  report.n_positive = cohort.positives();

  const Eigen::MatrixXd X = design_matrix(cohort.records, report.manifest);
  const Eigen::VectorXi y = label_vector(cohort.records);
  validate_plan(plan, y);

  const std::size_t jobs = plan.k * plan.repeats;
  std::vector<FoldResult> results(jobs);
  std::vector<std::exception_ptr> failures(jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      const std::size_t r = j / plan.k, f = j % plan.k;
      try {
        results[j] = run_fold(cohort, spec, plan, X, y, r, f, options);
      } catch (...) {
        failures[j] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(options.threads, 1, std::max<std::size_t>(jobs, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (std::size_t j = 0; j < jobs; ++j) {
    if (!failures[j]) continue;
    const std::string where = report.model + ", repeat " + std::to_string(j / plan.k) + ", fold " + std::to_string(j % plan.k);
    try {
      std::rethrow_exception(failures[j]);
    } catch (const Error& e) {
      throw Error(e.kind(), where + ": " + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorKind::InvalidArgument, where + ": " + e.what());
    }
  }
  report.folds = std::move(results);
  return report;
}

nlohmann::json to_json(const FoldResult& f) {
  nlohmann::json j{{"repeat", f.repeat},
                   {"fold", f.fold},
                   {"model_seed", f.model_seed},
                   {"n_train", f.n_train},
                   {"n_synthetic", f.n_synthetic},
                   {"n_test", f.test_ids.size()},
                   {"test_ids", f.test_ids},
                   {"auc", f.auc},
                   {"cutoff", {{"threshold", f.cutoff.threshold}, {"train_youden_j", f.cutoff.youden_j}}},
                   {"at_cutoff", to_json(f.at_cutoff)},
                   {"at_0_5", to_json(f.at_half)},
                   {"roc", to_json(f.roc)}};
  if (!f.importance.empty()) j["importance_raw"] = f.importance;
  return j;
}

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : r.folds) folds.push_back(to_json(f));
  nlohmann::json aggregate = nlohmann::json::object();
  for (const auto& m : report_metric_names()) {
    const auto s = r.aggregate(m);
    aggregate[m] = {{"mean", s.mean}, {"sd", s.sd}, {"min", s.min}, {"max", s.max}};
  }
  nlohmann::json j{{"schema", kReportSchema},
                   {"model", {{"name", r.model}, {"manifest", r.manifest}, {"hyperparameters", r.hyperparameters}}},
                   {"master_seed", r.master_seed},
                   {"k", r.k},
                   {"repeats", r.repeats},
                   {"smote", r.smote},
                   {"cohort",
                    {{"filter", r.cohort_filter},
                     {"source_digest", r.cohort_digest},
                     {"records", r.n_records},
                     {"positives", r.n_positive}}},
                   {"aggregate", aggregate},
                   {"folds", folds}};
  if (auto imp = r.importance(); !imp.empty()) j["importance"] = to_json(imp);
  return j;
}

}  // namespace hemascreen
