#include "hemascreen/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "hemascreen/csv.hpp"
#include "hemascreen/error.hpp"
#include "hemascreen/io.hpp"

namespace hemascreen {

namespace {

constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{
    "hematocrit", "hemoglobin",  "platelets", "mpv", "rbc",       "lymphocytes", "mchc",
    "leukocytes", "basophils", "mch",       "eosinophils", "mcv", "monocytes", "rbcdw"};

constexpr std::array<std::string_view, kPathogenCount> kPathogenKeys{
    "adenovirus",
    "bordetella_pertussis",
    "chlamydophila_pneumoniae",
    "coronavirus_229e",
    "coronavirus_hku1",
    "coronavirus_nl63",
    "coronavirus_oc43",
    "influenza_a_h1n1_2009",
    "influenza_a",
    "influenza_b",
    "metapneumovirus",
    "parainfluenza_1",
    "parainfluenza_2",
    "parainfluenza_3",
    "parainfluenza_4",
    "respiratory_syncytial_virus",
    "rhinovirus_enterovirus",
};

constexpr std::array<std::string_view, kPathogenCount> kPathogenDisplay{
    "Adenovirus",
    "Bordetella pertussis",
    "Chlamydophila pneumoniae",
    "Coronavirus 229E",
    "Coronavirus HKU1",
    "Coronavirus NL63",
    "Coronavirus OC43",
    "Influenza A H1N1 2009",
    "Influenza A",
    "Influenza B",
    "Metapneumovirus",
    "Parainfluenza 1",
    "Parainfluenza 2",
    "Parainfluenza 3",
    "Parainfluenza 4",
    "Respiratory Syncytial Virus",
    "Rhinovirus/Enterovirus",
};

bool contains(const std::vector<std::string>& values, const std::string& v) {
  return std::find(values.begin(), values.end(), v) != values.end();
}

class HeaderIndex {
 public:
  explicit HeaderIndex(const std::vector<std::string>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      auto [it, inserted] = columns_.emplace(trim(header[i]), i);
      if (!inserted) throw Error(ErrorKind::MalformedHeader, "duplicate header '" + header[i] + "'");
    }
  }

  std::size_t require(const std::string& name) const {
    auto it = columns_.find(trim(name));
    if (it == columns_.end()) throw Error(ErrorKind::MalformedHeader, "column '" + name + "' not found");
    return it->second;
  }

  std::optional<std::size_t> find(const std::optional<std::string>& name) const {
    if (!name) return std::nullopt;
    auto it = columns_.find(trim(*name));
    if (it == columns_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::unordered_map<std::string, std::size_t> columns_;
};

std::string string_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorKind::BadMapping, std::string("missing required key '") + key + "'");
  if (!j.at(key).is_string()) throw Error(ErrorKind::BadMapping, std::string("key '") + key + "' must be a string");
  return j.at(key).get<std::string>();
}

std::vector<std::string> string_list(const nlohmann::json& value, const std::string& key) {
  if (value.is_string()) return {value.get<std::string>()};
  if (!value.is_array()) throw Error(ErrorKind::BadMapping, "key '" + key + "' must be a string or list of strings");
  std::vector<std::string> out;
  for (const auto& v : value) {
    if (!v.is_string()) throw Error(ErrorKind::BadMapping, "key '" + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

const std::array<std::string_view, kFeatureCount>& feature_names() noexcept { return kFeatureNames; }

std::string_view name_of(Feature f) noexcept { return kFeatureNames[index_of(f)]; }

std::optional<Feature> feature_from_name(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kFeatureCount; ++i)
    if (kFeatureNames[i] == name) return static_cast<Feature>(i);
  return std::nullopt;
}

std::string_view name_of(Location loc) noexcept {
  switch (loc) {
    case Location::Community: return "community";
    case Location::RegularWard: return "regular_ward";
    case Location::SemiIntensive: return "semi_intensive";
    case Location::ICU: return "icu";
  }
  return "unknown";
}

std::string_view name_of(Label label) noexcept { return label == Label::Positive ? "positive" : "negative"; }

const std::array<std::string_view, kPathogenCount>& pathogen_keys() noexcept { return kPathogenKeys; }
const std::array<std::string_view, kPathogenCount>& pathogen_display_names() noexcept { return kPathogenDisplay; }

std::size_t Cohort::positives() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const auto& r) { return r.label == Label::Positive; }));
}

std::size_t Cohort::negatives() const noexcept { return records.size() - positives(); }

ColumnMapping ColumnMapping::public_release() {
  ColumnMapping m;
  m.patient_id = "Patient ID";
  m.age_quantile = "Patient age quantile";
  m.label = "SARS-Cov-2 exam result";
  m.admission_regular_ward = "Patient addmited to regular ward (1=yes, 0=no)";
  m.admission_semi_intensive = "Patient addmited to semi-intensive unit (1=yes, 0=no)";
  m.admission_icu = "Patient addmited to intensive care unit (1=yes, 0=no)";
  m.features = {"Hematocrit",
                "Hemoglobin",
                "Platelets",
                "Mean platelet volume",
                "Red blood Cells",
                "Lymphocytes",
                "Mean corpuscular hemoglobin concentration (MCHC)",
                "Leukocytes",
                "Basophils",
                "Mean corpuscular hemoglobin (MCH)",
                "Eosinophils",
                "Mean corpuscular volume (MCV)",
                "Monocytes",
                "Red blood cell distribution width (RDW)"};
  m.neutrophils = "Neutrophils";
  m.pathogens = {"Adenovirus",
                 "Bordetella pertussis",
                 "Chlamydophila pneumoniae",
                 "Coronavirus229E",
                 "Coronavirus HKU1",
                 "CoronavirusNL63",
                 "CoronavirusOC43",
                 "Inf A H1N1 2009",
                 "Influenza A",
                 "Influenza B",
                 "Metapneumovirus",
                 "Parainfluenza 1",
                 "Parainfluenza 2",
                 "Parainfluenza 3",
                 "Parainfluenza 4",
                 "Respiratory Syncytial Virus",
                 "Rhinovirus/Enterovirus"};
  return m;
}

ColumnMapping ColumnMapping::canonical() {
  ColumnMapping m;
  m.patient_id = "patient_id";
  m.age_quantile = "age_quantile";
  m.label = "label";
  m.admission_regular_ward = "admitted_regular_ward";
  m.admission_semi_intensive = "admitted_semi_intensive";
  m.admission_icu = "admitted_icu";
  m.admission_true_values = {"1"};
  m.admission_false_values = {"0"};
  for (std::size_t i = 0; i < kFeatureCount; ++i) m.features[i] = std::string(kFeatureNames[i]);
  m.neutrophils = "neutrophils";
  for (std::size_t i = 0; i < kPathogenCount; ++i) m.pathogens[i] = std::string(kPathogenKeys[i]);
  m.pathogen_positive_values = {"positive"};
  m.pathogen_negative_values = {"negative"};
  return m;
}

ColumnMapping ColumnMapping::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::BadMapping, "mapping must be a JSON object");
  ColumnMapping m;
  m.patient_id = string_field(j, "patient_id");
  m.label = string_field(j, "label");
  m.admission_regular_ward = string_field(j, "admission_regular_ward");
  m.admission_semi_intensive = string_field(j, "admission_semi_intensive");
  m.admission_icu = string_field(j, "admission_icu");
  for (std::size_t i = 0; i < kFeatureCount; ++i) m.features[i] = string_field(j, std::string(kFeatureNames[i]).c_str());

  std::unordered_set<std::string> known{"patient_id",
                                        "label",
                                        "admission_regular_ward",
                                        "admission_semi_intensive",
                                        "admission_icu",
                                        "age_quantile",
                                        "neutrophils",
                                        "label_positive_value",
                                        "label_negative_value",
                                        "admission_true_values",
                                        "admission_false_values",
                                        "pathogen_positive_values",
                                        "pathogen_negative_values"};
  for (auto name : kFeatureNames) known.emplace(name);
  for (auto name : kPathogenKeys) known.emplace(name);
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw Error(ErrorKind::BadMapping, "unknown key '" + key + "'");

  if (j.contains("age_quantile")) m.age_quantile = string_field(j, "age_quantile");
  if (j.contains("neutrophils")) m.neutrophils = string_field(j, "neutrophils");
  if (j.contains("label_positive_value")) m.label_positive_value = string_field(j, "label_positive_value");
  if (j.contains("label_negative_value")) m.label_negative_value = string_field(j, "label_negative_value");
  for (const char* key : {"admission_true_values", "admission_false_values", "pathogen_positive_values",
                          "pathogen_negative_values"}) {
    if (!j.contains(key)) continue;
    auto values = string_list(j.at(key), key);
    std::string_view k = key;
    if (k == "admission_true_values") m.admission_true_values = std::move(values);
    else if (k == "admission_false_values") m.admission_false_values = std::move(values);
    else if (k == "pathogen_positive_values") m.pathogen_positive_values = std::move(values);
    else m.pathogen_negative_values = std::move(values);
  }
  for (std::size_t i = 0; i < kPathogenCount; ++i) {
    const std::string key(kPathogenKeys[i]);
    if (j.contains(key)) m.pathogens[i] = string_field(j, key.c_str());
  }
  if (m.label_positive_value == m.label_negative_value)
    throw Error(ErrorKind::BadMapping, "label_positive_value and label_negative_value must differ");

  std::unordered_set<std::string> headers;
  auto claim = [&](const std::string& header, std::string_view owner) {
    if (!headers.insert(trim(header)).second)
      throw Error(ErrorKind::BadMapping, "header '" + header + "' mapped more than once (at '" + std::string(owner) + "')");
  };
  claim(m.patient_id, "patient_id");
  claim(m.label, "label");
  claim(m.admission_regular_ward, "admission_regular_ward");
  claim(m.admission_semi_intensive, "admission_semi_intensive");
  claim(m.admission_icu, "admission_icu");
  for (std::size_t i = 0; i < kFeatureCount; ++i) claim(m.features[i], kFeatureNames[i]);
  if (m.age_quantile) claim(*m.age_quantile, "age_quantile");
  if (m.neutrophils) claim(*m.neutrophils, "neutrophils");
  for (std::size_t i = 0; i < kPathogenCount; ++i)
    if (m.pathogens[i]) claim(*m.pathogens[i], kPathogenKeys[i]);
  return m;
}

nlohmann::json ColumnMapping::to_json() const {
  nlohmann::json j;
  j["patient_id"] = patient_id;
  if (age_quantile) j["age_quantile"] = *age_quantile;
  j["label"] = label;
  j["label_positive_value"] = label_positive_value;
  j["label_negative_value"] = label_negative_value;
  j["admission_regular_ward"] = admission_regular_ward;
  j["admission_semi_intensive"] = admission_semi_intensive;
  j["admission_icu"] = admission_icu;
  j["admission_true_values"] = admission_true_values;
  j["admission_false_values"] = admission_false_values;
  for (std::size_t i = 0; i < kFeatureCount; ++i) j[std::string(kFeatureNames[i])] = features[i];
  if (neutrophils) j["neutrophils"] = *neutrophils;
  for (std::size_t i = 0; i < kPathogenCount; ++i)
    if (pathogens[i]) j[std::string(kPathogenKeys[i])] = *pathogens[i];
  j["pathogen_positive_values"] = pathogen_positive_values;
  j["pathogen_negative_values"] = pathogen_negative_values;
  return j;
}

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kHex[h & 0xF];
  return out;
}

ParseResult parse_dataset(std::istream& csv_stream, const ColumnMapping& mapping) {
  const std::string bytes(std::istreambuf_iterator<char>(csv_stream), {});
  ParseResult result;
  result.source_digest = fnv1a64_hex(bytes);

  std::istringstream in(bytes);
  csv::Reader reader(in);
  std::vector<std::string> header;
  if (!reader.next(header)) throw Error(ErrorKind::MalformedHeader, "missing header row");
  const HeaderIndex index(header);

  const std::size_t col_id = index.require(mapping.patient_id);
  const std::size_t col_label = index.require(mapping.label);
  const std::array<std::size_t, 3> col_admission{index.require(mapping.admission_regular_ward),
                                                 index.require(mapping.admission_semi_intensive),
                                                 index.require(mapping.admission_icu)};
  std::array<std::size_t, kFeatureCount> col_features{};
  for (std::size_t i = 0; i < kFeatureCount; ++i) col_features[i] = index.require(mapping.features[i]);
  const auto col_age = mapping.age_quantile ? std::optional(index.require(*mapping.age_quantile)) : std::nullopt;
  const auto col_neutrophils = index.find(mapping.neutrophils);
  std::array<std::optional<std::size_t>, kPathogenCount> col_pathogens{};
  for (std::size_t i = 0; i < kPathogenCount; ++i) col_pathogens[i] = index.find(mapping.pathogens[i]);

  std::unordered_set<std::string> seen_ids;
  std::vector<std::string> row;
  std::size_t row_index = 0;
  while (reader.next(row)) {
    if (row.size() == 1 && row[0].empty() && header.size() > 1) continue;  // blank line
    ++row_index;
    if (row.size() != header.size())
      throw RowError(ErrorKind::MalformedRow, row_index,
                     "expected " + std::to_string(header.size()) + " fields, found " + std::to_string(row.size()));

    const bool complete = std::all_of(col_features.begin(), col_features.end(),
                                      [&](std::size_t c) { return !trim(row[c]).empty(); });
    if (!complete) {
      ++result.excluded_incomplete;
      continue;
    }

    BloodCountRecord rec;
    rec.patient_id = trim(row[col_id]);
    if (rec.patient_id.empty()) throw RowError(ErrorKind::MalformedRow, row_index, "empty patient id");

    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      auto v = parse_real(row[col_features[i]]);
      if (!v)
        throw RowError(ErrorKind::MalformedRow, row_index,
                       "cannot parse " + std::string(kFeatureNames[i]) + " value '" + row[col_features[i]] + "'");
      rec.features[i] = *v;
    }

    const std::string label = trim(row[col_label]);
    if (label == mapping.label_positive_value) rec.label = Label::Positive;
    else if (label == mapping.label_negative_value) rec.label = Label::Negative;
    else throw RowError(ErrorKind::MalformedRow, row_index, "unrecognized label '" + label + "'");

    constexpr std::array<Location, 3> kWards{Location::RegularWard, Location::SemiIntensive, Location::ICU};
    int admitted = 0;
    for (std::size_t w = 0; w < 3; ++w) {
      const std::string cell = trim(row[col_admission[w]]);
      if (contains(mapping.admission_true_values, cell)) {
        ++admitted;
        rec.location = kWards[w];
      } else if (!contains(mapping.admission_false_values, cell)) {
        throw RowError(ErrorKind::MalformedRow, row_index, "unrecognized admission flag '" + cell + "'");
      }
    }
    if (admitted > 1)
      throw RowError(ErrorKind::ConflictingAdmission, row_index, "patient " + rec.patient_id + " has " +
                                                                     std::to_string(admitted) + " admission flags set");

    if (col_age && !trim(row[*col_age]).empty()) {
      rec.age_quantile = parse_int(row[*col_age]);
      if (!rec.age_quantile)
        throw RowError(ErrorKind::MalformedRow, row_index, "cannot parse age quantile '" + row[*col_age] + "'");
    }
    if (col_neutrophils && !trim(row[*col_neutrophils]).empty()) {
      rec.neutrophils = parse_real(row[*col_neutrophils]);
      if (!rec.neutrophils)
        throw RowError(ErrorKind::MalformedRow, row_index, "cannot parse neutrophils '" + row[*col_neutrophils] + "'");
    }

    PathogenPanel panel{};
    bool any_tested = false;
    for (std::size_t i = 0; i < kPathogenCount; ++i) {
      if (!col_pathogens[i]) continue;
      const std::string cell = trim(row[*col_pathogens[i]]);
      if (contains(mapping.pathogen_positive_values, cell)) panel[i] = PathogenResult::Positive;
      else if (contains(mapping.pathogen_negative_values, cell)) panel[i] = PathogenResult::Negative;
      any_tested = any_tested || panel[i] != PathogenResult::NotTested;
    }
    if (any_tested) rec.pathogen_panel = panel;

    if (!seen_ids.insert(rec.patient_id).second)
      throw RowError(ErrorKind::DuplicatePatient, row_index, "patient id '" + rec.patient_id + "' repeated");
    result.records.push_back(std::move(rec));
  }
  result.rows_read = row_index;
  return result;
}

Cohort select_cohort(std::span<const BloodCountRecord> records, const LocationSet& site_filter,
                     std::string source_digest) {
  if (site_filter.empty()) throw Error(ErrorKind::InvalidArgument, "site filter is empty");
  Cohort cohort;
  cohort.site_filter = site_filter;
  for (auto name : kFeatureNames) cohort.feature_manifest.emplace_back(name);
  std::unordered_set<std::string_view> ids;
  for (const auto& r : records) {
    if (!site_filter.contains(r.location)) continue;
    if (!ids.insert(r.patient_id).second)
      throw Error(ErrorKind::DuplicatePatient, "patient id '" + r.patient_id + "' repeated");
    cohort.records.push_back(r);
  }
  std::string filter = "location in {";
  for (auto it = site_filter.begin(); it != site_filter.end(); ++it)
    filter += (it == site_filter.begin() ? "" : ",") + std::string(name_of(*it));
  filter += "}";
  if (cohort.records.empty()) throw Error(ErrorKind::EmptyCohort, "no records with " + filter);
  cohort.provenance = {std::move(source_digest), std::move(filter)};
  return cohort;
}

Standardized standardize(const Eigen::Ref<const Eigen::VectorXd>& values) {
  const Eigen::Index n = values.size();
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "standardize needs at least two values");
  if (!values.allFinite()) throw Error(ErrorKind::InvalidArgument, "non-finite value");
  Standardized out;
  out.mean = values.mean();
  const Eigen::VectorXd centred = values.array() - out.mean;
  out.sd = std::sqrt(centred.squaredNorm() / static_cast<double>(n - 1));
  if (!(out.sd > 0.0)) throw Error(ErrorKind::DegenerateFeature, "zero standard deviation");
  out.values = centred / out.sd;
  return out;
}

Eigen::VectorXd apply_standardization(const Eigen::Ref<const Eigen::VectorXd>& values, double mean, double sd) {
  if (!(sd > 0.0)) throw Error(ErrorKind::DegenerateFeature, "zero standard deviation");
  return (values.array() - mean) / sd;
}

std::size_t CohortSummary::pathogen_total(std::size_t pathogen) const noexcept {
  std::size_t s = 0;
  for (auto c : pathogen_positive[pathogen]) s += c;
  return s;
}

std::size_t CohortSummary::pathogen_location_total(std::size_t location) const noexcept {
  std::size_t s = 0;
  for (const auto& row : pathogen_positive) s += row[location];
  return s;
}

std::size_t CohortSummary::pathogen_grand_total() const noexcept {
  std::size_t s = 0;
  for (std::size_t p = 0; p < kPathogenCount; ++p) s += pathogen_total(p);
  return s;
}

CohortSummary cohort_summary(std::span<const BloodCountRecord> records) {
  CohortSummary s;
  for (const auto& r : records) {
    const auto loc = static_cast<std::size_t>(r.location);
    for (LocationCounts* c : {&s.by_location[loc], &s.overall}) {
      (r.label == Label::Positive ? c->positive : c->negative) += 1;
      if (r.pathogen_panel) {
        c->with_panel += 1;
        if (std::any_of(r.pathogen_panel->begin(), r.pathogen_panel->end(),
                        [](PathogenResult p) { return p == PathogenResult::Positive; }))
          c->other_pathogen_positive += 1;
      }
    }
    if (r.pathogen_panel)
      for (std::size_t p = 0; p < kPathogenCount; ++p)
        if ((*r.pathogen_panel)[p] == PathogenResult::Positive) s.pathogen_positive[p][loc] += 1;
  }
  return s;
}

nlohmann::json to_json(const CohortSummary& s) {
  auto pct = [](std::size_t part, std::size_t whole) {
    return whole == 0 ? 0.0 : std::round(1000.0 * static_cast<double>(part) / static_cast<double>(whole)) / 10.0;
  };
  auto counts_json = [&](const LocationCounts& c) {
    return nlohmann::json{{"positive", c.positive},
                          {"positive_percent", pct(c.positive, c.total())},
                          {"negative", c.negative},
                          {"negative_percent", pct(c.negative, c.total())},
                          {"total", c.total()},
                          {"with_pathogen_panel", c.with_panel},
                          {"other_pathogen_positive", c.other_pathogen_positive},
                          {"other_pathogen_percent", pct(c.other_pathogen_positive, c.total())}};
  };
  nlohmann::json j;
  j["schema"] = "hemascreen.cohort_summary/1";
  nlohmann::json locations = nlohmann::json::object();
  for (auto loc : kAllLocations) locations[std::string(name_of(loc))] = counts_json(s.by_location[static_cast<std::size_t>(loc)]);
  j["by_location"] = locations;
  j["overall"] = counts_json(s.overall);

  nlohmann::json pathogens = nlohmann::json::array();
  for (std::size_t p = 0; p < kPathogenCount; ++p) {
    nlohmann::json row{{"pathogen", kPathogenDisplay[p]}, {"key", kPathogenKeys[p]}};
    for (auto loc : kAllLocations) row[std::string(name_of(loc))] = s.pathogen_positive[p][static_cast<std::size_t>(loc)];
    row["total"] = s.pathogen_total(p);
    pathogens.push_back(row);
  }
  nlohmann::json totals{{"pathogen", "Total"}};
  for (auto loc : kAllLocations) totals[std::string(name_of(loc))] = s.pathogen_location_total(static_cast<std::size_t>(loc));
  totals["total"] = s.pathogen_grand_total();
  j["pathogen_positive"] = pathogens;
  j["pathogen_totals"] = totals;
  return j;
}

void write_cohort_csv(std::ostream& out, std::span<const BloodCountRecord> records) {
  const ColumnMapping m = ColumnMapping::canonical();
  std::vector<std::string> fields{m.patient_id, *m.age_quantile, m.label, m.admission_regular_ward,
                                  m.admission_semi_intensive, m.admission_icu};
  for (const auto& f : m.features) fields.push_back(f);
  fields.push_back(*m.neutrophils);
  for (const auto& p : m.pathogens) fields.push_back(*p);
  csv::write_row(out, fields);

  for (const auto& r : records) {
    fields.clear();
    fields.push_back(r.patient_id);
    fields.push_back(r.age_quantile ? std::to_string(*r.age_quantile) : "");
    fields.emplace_back(name_of(r.label));
    fields.emplace_back(r.location == Location::RegularWard ? "1" : "0");
    fields.emplace_back(r.location == Location::SemiIntensive ? "1" : "0");
    fields.emplace_back(r.location == Location::ICU ? "1" : "0");
    for (double v : r.features) fields.push_back(format_real(v));
    fields.push_back(r.neutrophils ? format_real(*r.neutrophils) : "");
    for (std::size_t p = 0; p < kPathogenCount; ++p) {
      const PathogenResult res = r.pathogen_panel ? (*r.pathogen_panel)[p] : PathogenResult::NotTested;
      fields.emplace_back(res == PathogenResult::Positive ? "positive" : res == PathogenResult::Negative ? "negative" : "");
    }
    csv::write_row(out, fields);
  }
}

Eigen::MatrixXd feature_matrix(std::span<const BloodCountRecord> records) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(records.size()), static_cast<Eigen::Index>(kFeatureCount));
  for (std::size_t i = 0; i < records.size(); ++i)
    for (std::size_t j = 0; j < kFeatureCount; ++j)
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = records[i].features[j];
  return X;
}

Eigen::VectorXi label_vector(std::span<const BloodCountRecord> records) {
  Eigen::VectorXi y(static_cast<Eigen::Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i) y(static_cast<Eigen::Index>(i)) = records[i].label == Label::Positive;
  return y;
}

}  // namespace hemascreen
