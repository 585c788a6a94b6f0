#include <gtest/gtest.h>

#include <sstream>

#include "hemascreen/csv.hpp"
#include "hemascreen/dataset.hpp"
#include "hemascreen/error.hpp"
#include "synthetic.hpp"

using namespace hemascreen;
using hemascreen::testkit::synthetic_public_csv;
using hemascreen::testkit::synthetic_records;

namespace {

ParseResult parse_text(const std::string& text, const ColumnMapping& m = ColumnMapping::public_release()) {
  std::istringstream in(text);
  return parse_dataset(in, m);
}

std::string header_line() {
  const auto csv = synthetic_public_csv(1, 0, {{{1, 0}, {0, 0}, {0, 0}, {0, 0}}});
  return csv.substr(0, csv.find('\n') + 1);
}

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(Features, CanonicalOrder) {
  const std::vector<std::string> expected{"hematocrit", "hemoglobin", "platelets",  "mpv",         "rbc",
                                          "lymphocytes", "mchc",      "leukocytes", "basophils",   "mch",
                                          "eosinophils", "mcv",       "monocytes",  "rbcdw"};
  ASSERT_EQ(feature_names().size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(feature_names()[i], expected[i]);
  EXPECT_FALSE(feature_from_name("neutrophils"));
  EXPECT_FALSE(feature_from_name("age_quantile"));
}

TEST(ParseDataset, HeaderOnlyFileIsEmpty) {
  const auto r = parse_text(header_line());
  EXPECT_TRUE(r.records.empty());
  EXPECT_EQ(r.excluded_incomplete, 0u);
}

TEST(ParseDataset, BlankEosinophilsExcludesRow) {
  auto text = synthetic_public_csv(2, 0, {{{1, 0}, {0, 0}, {0, 0}, {0, 0}}});
  std::istringstream in(text);
  csv::Reader reader(in);
  std::vector<std::string> header, row;
  reader.next(header);
  reader.next(row);
  const auto col = std::find(header.begin(), header.end(), "Eosinophils") - header.begin();
  row[static_cast<std::size_t>(col)] = "";
  std::ostringstream out;
  csv::write_row(out, header);
  csv::write_row(out, row);
  const auto r = parse_text(out.str());
  EXPECT_EQ(r.records.size(), 0u);
  EXPECT_EQ(r.excluded_incomplete, 1u);
}

TEST(ParseDataset, CountsKeptAndExcluded) {
  const auto r = parse_text(synthetic_public_csv(3, 250));
  EXPECT_EQ(r.records.size(), 598u);
  EXPECT_EQ(r.excluded_incomplete, 250u);
  EXPECT_EQ(r.rows_read, 848u);
  EXPECT_EQ(r.source_digest.size(), 16u);
}

TEST(ParseDataset, LocationFromAdmissionFlags) {
  const auto r = parse_text(synthetic_public_csv(4));
  std::array<std::size_t, 4> per{};
  for (const auto& rec : r.records) ++per[static_cast<std::size_t>(rec.location)];
  EXPECT_EQ(per, (std::array<std::size_t, 4>{470, 57, 42, 29}));
}

TEST(ParseDataset, ConflictingAdmissionIsRejected) {
  const auto m = ColumnMapping::public_release();
  auto text = synthetic_public_csv(5, 0, {{{0, 0}, {1, 0}, {0, 0}, {0, 0}}});
  // The single record is in the regular ward; raise the ICU flag too.
  std::istringstream in(text);
  csv::Reader reader(in);
  std::vector<std::string> header, row;
  reader.next(header);
  reader.next(row);
  row[static_cast<std::size_t>(std::find(header.begin(), header.end(), m.admission_icu) - header.begin())] = "1";
  std::ostringstream out;
  csv::write_row(out, header);
  csv::write_row(out, row);
  try {
    parse_text(out.str());
    FAIL();
  } catch (const RowError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConflictingAdmission);
    EXPECT_EQ(e.row_index(), 1u);
  }
}

TEST(ParseDataset, MalformedCellCarriesRowIndex) {
  auto text = synthetic_public_csv(6, 0, {{{3, 0}, {0, 0}, {0, 0}, {0, 0}}});
  std::istringstream in(text);
  csv::Reader reader(in);
  std::vector<std::vector<std::string>> rows;
  for (std::vector<std::string> row; reader.next(row);) rows.push_back(row);
  rows[2][6] = "12,5";  // first feature column, decimal comma
  std::ostringstream out;
  for (const auto& row : rows) csv::write_row(out, row);
  try {
    parse_text(out.str());
    FAIL();
  } catch (const RowError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MalformedRow);
    EXPECT_EQ(e.row_index(), 2u);
  }
}

TEST(ParseDataset, MissingHeaderIsMalformedHeader) {
  EXPECT_EQ(kind_of([] { parse_text("Patient ID,SARS-Cov-2 exam result\nA,negative\n"); }), ErrorKind::MalformedHeader);
}

TEST(ParseDataset, DuplicatePatientRejected) {
  auto text = synthetic_public_csv(7, 0, {{{1, 0}, {0, 0}, {0, 0}, {0, 0}}});
  const auto body = text.substr(text.find('\n') + 1);
  EXPECT_EQ(kind_of([&] { parse_text(text + body); }), ErrorKind::DuplicatePatient);
}

TEST(SelectCohort, HospitalLayoutCounts) {
  const auto records = synthetic_records(8);
  const auto community = select_cohort(records, {Location::Community});
  EXPECT_EQ(community.size(), 470u);
  EXPECT_EQ(community.positives(), 39u);
  EXPECT_EQ(community.negatives(), 431u);
  const auto ward = select_cohort(records, {Location::RegularWard});
  EXPECT_EQ(ward.size(), 57u);
  EXPECT_EQ(ward.positives(), 26u);
  const auto icu = select_cohort(records, {Location::ICU});
  EXPECT_EQ(icu.size(), 29u);
  EXPECT_EQ(icu.positives(), 8u);
  for (const auto& r : ward.records) EXPECT_EQ(r.location, Location::RegularWard);
}

TEST(SelectCohort, PartitionSumsToTotal) {
  const auto records = synthetic_records(9);
  std::size_t total = 0;
  for (auto loc : kAllLocations) total += select_cohort(records, {loc}).size();
  EXPECT_EQ(total, records.size());
}

TEST(SelectCohort, Errors) {
  const auto records = synthetic_records(10, {{{5, 5}, {0, 0}, {0, 0}, {0, 0}}});
  EXPECT_EQ(kind_of([&] { select_cohort(records, {Location::ICU}); }), ErrorKind::EmptyCohort);
  EXPECT_EQ(kind_of([&] { select_cohort(records, {}); }), ErrorKind::InvalidArgument);
}

TEST(RoundTrip, CanonicalCsvIsFixpoint) {
  const auto parsed = parse_text(synthetic_public_csv(11, 20));
  const auto cohort = select_cohort(parsed.records, {Location::Community, Location::RegularWard});
  std::ostringstream first;
  write_cohort_csv(first, cohort.records);
  const auto reparsed = parse_text(first.str(), ColumnMapping::canonical());
  ASSERT_EQ(reparsed.records.size(), cohort.size());
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    const auto& a = cohort.records[i];
    const auto& b = reparsed.records[i];
    EXPECT_EQ(a.patient_id, b.patient_id);
    EXPECT_EQ(a.features, b.features);
    EXPECT_EQ(a.location, b.location);
    EXPECT_EQ(a.label, b.label);
    EXPECT_EQ(a.neutrophils, b.neutrophils);
    EXPECT_EQ(a.pathogen_panel, b.pathogen_panel);
    EXPECT_EQ(a.age_quantile, b.age_quantile);
  }
  std::ostringstream second;
  write_cohort_csv(second, reparsed.records);
  EXPECT_EQ(first.str(), second.str());
}

TEST(ColumnMappingJson, RoundTripAndValidation) {
  const auto m = ColumnMapping::public_release();
  const auto back = ColumnMapping::from_json(m.to_json());
  EXPECT_EQ(back.to_json(), m.to_json());

  auto bad = m.to_json();
  bad["no_such_field"] = "x";
  EXPECT_EQ(kind_of([&] { ColumnMapping::from_json(bad); }), ErrorKind::BadMapping);

  auto dup = m.to_json();
  dup["hemoglobin"] = dup["hematocrit"];
  EXPECT_EQ(kind_of([&] { ColumnMapping::from_json(dup); }), ErrorKind::BadMapping);
}

TEST(Standardize, Examples) {
  Eigen::VectorXd v(3);
  v << 1, 2, 3;
  const auto s = standardize(v);
  EXPECT_DOUBLE_EQ(s.mean, 2.0);
  EXPECT_DOUBLE_EQ(s.sd, 1.0);
  EXPECT_NEAR(s.values(0), -1.0, 1e-15);
  EXPECT_NEAR(s.values(1), 0.0, 1e-15);
  EXPECT_NEAR(s.values(2), 1.0, 1e-15);
  EXPECT_EQ(kind_of([] { standardize(Eigen::VectorXd::Constant(3, 5.0)); }), ErrorKind::DegenerateFeature);
}

TEST(Standardize, IdempotentOnRandomColumns) {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd v(2 + static_cast<Eigen::Index>(rng.index(40)));
    for (auto& x : v) x = rng.uniform(-50, 300);
    const auto once = standardize(v);
    EXPECT_NEAR(once.values.mean(), 0.0, 1e-9);
    const double sd = std::sqrt((once.values.array() - once.values.mean()).square().sum() / static_cast<double>(v.size() - 1));
    EXPECT_NEAR(sd, 1.0, 1e-9);
    const auto twice = standardize(once.values);
    EXPECT_LT((twice.values - once.values).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((apply_standardization(v, once.mean, once.sd) - once.values).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(CohortSummary, EmptyInputIsZero) {
  const auto s = cohort_summary({});
  EXPECT_EQ(s.overall.total(), 0u);
  EXPECT_EQ(s.pathogen_grand_total(), 0u);
}

TEST(CohortSummary, TotalsMatchRecords) {
  const auto records = synthetic_records(13);
  const auto s = cohort_summary(records);
  EXPECT_EQ(s.overall.positive, 81u);
  EXPECT_EQ(s.overall.negative, 517u);
  EXPECT_EQ(s.by_location[0].positive, 39u);
  std::size_t positives = 0;
  std::array<std::size_t, 4> per_location{};
  std::size_t with_panel = 0;
  for (const auto& r : records) {
    if (!r.pathogen_panel) continue;
    ++with_panel;
    for (auto p : *r.pathogen_panel) {
      positives += p == PathogenResult::Positive;
      per_location[static_cast<std::size_t>(r.location)] += p == PathogenResult::Positive;
    }
  }
  EXPECT_EQ(s.overall.with_panel, with_panel);
  EXPECT_EQ(s.pathogen_grand_total(), positives);
  for (std::size_t l = 0; l < 4; ++l) EXPECT_EQ(s.pathogen_location_total(l), per_location[l]);
  const auto j = to_json(s);
  EXPECT_EQ(j.at("schema"), "hemascreen.cohort_summary/1");
}
