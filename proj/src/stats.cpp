#include "hemascreen/stats.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "hemascreen/error.hpp"

namespace hemascreen {

namespace {

// Largest n1+n2 for which forced exact enumeration still fits uint64 counts.
constexpr std::size_t kExactForceLimit = 60;

double exact_two_sided_p(std::size_t n1, std::size_t n2, double u) {
  const std::size_t N = n1 + n2;
  const std::size_t max_sum = N * (N + 1) / 2;
  // ways[k][s]: subsets of size k from the ranks seen so far with rank sum s.
  std::vector<std::vector<std::uint64_t>> ways(n1 + 1, std::vector<std::uint64_t>(max_sum + 1, 0));
  ways[0][0] = 1;
  for (std::size_t r = 1; r <= N; ++r)
    for (std::size_t k = std::min(r, n1); k >= 1; --k)
      for (std::size_t s = max_sum; s >= r; --s) ways[k][s] += ways[k - 1][s - r];

  const std::size_t offset = n1 * (n1 + 1) / 2;
  std::uint64_t total = 0, lower = 0, upper = 0;
  for (std::size_t s = offset; s <= max_sum; ++s) {
    const std::uint64_t c = ways[n1][s];
    const double us = static_cast<double>(s - offset);
    total += c;
    if (us <= u) lower += c;
    if (us >= u) upper += c;
  }
  const double p = 2.0 * static_cast<double>(std::min(lower, upper)) / static_cast<double>(total);
  return std::min(1.0, p);
}

double normal_two_sided_p(std::size_t n1, std::size_t n2, double u, const Eigen::VectorXd& pooled) {
  const double a = static_cast<double>(n1), b = static_cast<double>(n2), N = a + b;
  std::vector<double> sorted(pooled.data(), pooled.data() + pooled.size());
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double variance = N > 1 ? (a * b / 12.0) * ((N + 1.0) - tie_term / (N * (N - 1.0))) : 0.0;
  if (!(variance > 0.0)) return 1.0;
  const double z = std::max(std::abs(u - a * b / 2.0) - 0.5, 0.0) / std::sqrt(variance);
  const double p = std::erfc(z / std::sqrt(2.0));
  return std::clamp(p, DBL_MIN, 1.0);
}

bool has_ties(const Eigen::VectorXd& pooled) {
  std::vector<double> v(pooled.data(), pooled.data() + pooled.size());
  std::sort(v.begin(), v.end());
  return std::adjacent_find(v.begin(), v.end()) != v.end();
}

Eigen::VectorXd sorted_copy(const Eigen::Ref<const Eigen::VectorXd>& values) {
  Eigen::VectorXd s = values;
  std::sort(s.data(), s.data() + s.size());
  return s;
}

double quantile_sorted(const Eigen::VectorXd& s, double q) {
  const double h = static_cast<double>(s.size() - 1) * q;
  const auto lo = static_cast<Eigen::Index>(std::floor(h));
  const Eigen::Index hi = std::min<Eigen::Index>(lo + 1, s.size() - 1);
  return s(lo) + (h - static_cast<double>(lo)) * (s(hi) - s(lo));
}

}  // namespace

Eigen::VectorXd mid_ranks(const Eigen::Ref<const Eigen::VectorXd>& values) {
  const Eigen::Index n = values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values(a) < values(b); });
  Eigen::VectorXd ranks(n);
  for (Eigen::Index i = 0; i < n;) {
    Eigen::Index j = i;
    while (j < n && values(order[static_cast<std::size_t>(j)]) == values(order[static_cast<std::size_t>(i)])) ++j;
    const double mid = 0.5 * static_cast<double>(i + 1 + j);
    for (Eigen::Index k = i; k < j; ++k) ranks(order[static_cast<std::size_t>(k)]) = mid;
    i = j;
  }
  return ranks;
}

RankSumResult wilcoxon_rank_sum(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                                std::optional<RankSumMethod> force) {
  if (x.size() == 0 || y.size() == 0) throw Error(ErrorKind::EmptySample, "rank-sum test needs two non-empty samples");
  if (!x.allFinite() || !y.allFinite()) throw Error(ErrorKind::InvalidArgument, "rank-sum test on non-finite values");

  RankSumResult r;
  r.n1 = static_cast<std::size_t>(x.size());
  r.n2 = static_cast<std::size_t>(y.size());
  Eigen::VectorXd pooled(x.size() + y.size());
  pooled << x, y;
  const Eigen::VectorXd ranks = mid_ranks(pooled);
  r.w_statistic = ranks.head(x.size()).sum();
  r.u_statistic = r.w_statistic - static_cast<double>(r.n1 * (r.n1 + 1)) / 2.0;

  const bool ties = has_ties(pooled);
  const std::size_t N = r.n1 + r.n2;
  RankSumMethod method = (N <= kExactRankSumLimit && !ties) ? RankSumMethod::Exact : RankSumMethod::NormalApprox;
  if (force) {
    if (*force == RankSumMethod::Exact && (ties || N > kExactForceLimit))
      throw Error(ErrorKind::InvalidArgument, "exact rank-sum distribution needs tie-free samples of total size <= 60");
    method = *force;
  }
  r.method = method;
  r.p_value = method == RankSumMethod::Exact ? exact_two_sided_p(r.n1, r.n2, r.u_statistic)
                                             : normal_two_sided_p(r.n1, r.n2, r.u_statistic, pooled);
  return r;
}

double quantile(const Eigen::Ref<const Eigen::VectorXd>& values, double q) {
  if (values.size() == 0) throw Error(ErrorKind::EmptySample, "quantile of empty sample");
  return quantile_sorted(sorted_copy(values), std::clamp(q, 0.0, 1.0));
}

double median(const Eigen::Ref<const Eigen::VectorXd>& values) { return quantile(values, 0.5); }

BoxSummary boxplot_summary(const Eigen::Ref<const Eigen::VectorXd>& values) {
  BoxSummary b;
  b.n = static_cast<std::size_t>(values.size());
  if (b.n == 0) return b;
  const Eigen::VectorXd s = sorted_copy(values);
  b.q1 = quantile_sorted(s, 0.25);
  b.median = quantile_sorted(s, 0.5);
  b.q3 = quantile_sorted(s, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr;
  const double hi_fence = b.q3 + 1.5 * iqr;
  b.whisker_low = b.q1;
  b.whisker_high = b.q3;
  bool any_inside = false;
  for (double v : s) {
    if (v < lo_fence || v > hi_fence) {
      b.outliers.push_back(v);
      continue;
    }
    if (!any_inside) b.whisker_low = v;
    b.whisker_high = v;
    any_inside = true;
  }
  return b;
}

std::string_view name_of(Direction d) noexcept {
  switch (d) {
    case Direction::Decreased: return "decreased";
    case Direction::Increased: return "increased";
    case Direction::Unchanged: return "unchanged";
  }
  return "unchanged";
}

std::size_t SignificanceTable::count_significant(double alpha) const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [&](const auto& r) { return r.p_value < alpha; }));
}

const SignificanceRow* SignificanceTable::find(std::string_view feature) const {
  for (const auto& r : rows)
    if (r.feature == feature) return &r;
  if (neutrophils && neutrophils->feature == feature) return &*neutrophils;
  return nullptr;
}

SignificanceRow screen_values(std::string name, const Eigen::Ref<const Eigen::VectorXd>& values,
                              const Eigen::Ref<const Eigen::VectorXi>& labels) {
  const Eigen::Index pos = labels.count();
  const Eigen::Index neg = labels.size() - pos;
  if (pos == 0 || neg == 0) throw Error(ErrorKind::SingleClassCohort, "both classes are required for '" + name + "'");
  Eigen::VectorXd xp(pos), xn(neg);
  for (Eigen::Index i = 0, a = 0, b = 0; i < values.size(); ++i) {
    if (labels(i)) xp(a++) = values(i);
    else xn(b++) = values(i);
  }
  SignificanceRow row;
  row.feature = std::move(name);
  row.test = wilcoxon_rank_sum(xp, xn);
  row.p_value = row.test.p_value;
  row.median_positive = median(xp);
  row.median_negative = median(xn);
  const double diff = row.median_positive - row.median_negative;
  row.direction = diff > 0 ? Direction::Increased : diff < 0 ? Direction::Decreased : Direction::Unchanged;
  return row;
}

SignificanceTable significance_table(const Cohort& cohort) {
  if (cohort.records.empty()) throw Error(ErrorKind::SingleClassCohort, "cohort is empty");
  const Eigen::MatrixXd X = feature_matrix(cohort.records);
  const Eigen::VectorXi y = label_vector(cohort.records);
  if (y.count() == 0 || y.count() == y.size())
    throw Error(ErrorKind::SingleClassCohort, "cohort holds only " + std::string(y.count() ? "positive" : "negative") + " records");

  SignificanceTable table;
  for (std::size_t j = 0; j < kFeatureCount; ++j)
    table.rows.push_back(screen_values(std::string(feature_names()[j]), X.col(static_cast<Eigen::Index>(j)), y));
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const auto& a, const auto& b) { return a.p_value < b.p_value; });

  std::vector<double> values;
  std::vector<int> labels;
  for (const auto& r : cohort.records) {
    if (!r.neutrophils) continue;
    values.push_back(*r.neutrophils);
    labels.push_back(r.label == Label::Positive);
  }
  const auto pos = std::count(labels.begin(), labels.end(), 1);
  if (pos > 0 && pos < static_cast<long>(labels.size()))
    table.neutrophils = screen_values("neutrophils", Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())),
                                      Eigen::Map<const Eigen::VectorXi>(labels.data(), static_cast<Eigen::Index>(labels.size())));
  return table;
}

nlohmann::json to_json(const RankSumResult& r) {
  return {{"w", r.w_statistic},
          {"u", r.u_statistic},
          {"p_value", r.p_value},
          {"method", r.method == RankSumMethod::Exact ? "exact" : "normal_approx"},
          {"n1", r.n1},
          {"n2", r.n2}};
}

nlohmann::json to_json(const BoxSummary& b) {
  return {{"n", b.n},           {"median", b.median},           {"q1", b.q1},
          {"q3", b.q3},         {"whisker_low", b.whisker_low}, {"whisker_high", b.whisker_high},
          {"outliers", b.outliers}};
}

nlohmann::json to_json(const SignificanceRow& row) {
  return {{"feature", row.feature},
          {"direction", name_of(row.direction)},
          {"p_value", row.p_value},
          {"significant", row.p_value < 0.05},
          {"median_positive", row.median_positive},
          {"median_negative", row.median_negative},
          {"test", to_json(row.test)}};
}

nlohmann::json to_json(const SignificanceTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) rows.push_back(to_json(r));
  nlohmann::json j{{"rows", rows}, {"significant_count", table.count_significant()}};
  j["neutrophils"] = table.neutrophils ? to_json(*table.neutrophils) : nlohmann::json(nullptr);
  return j;
}

}  // namespace hemascreen
