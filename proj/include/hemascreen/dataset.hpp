#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace hemascreen {

inline constexpr std::size_t kFeatureCount = 14;
inline constexpr std::size_t kPathogenCount = 17;

/// The fourteen modeled blood-count parameters in canonical order. Column j of
/// every feature matrix in this library is Feature(j).
enum class Feature : std::uint8_t {
  Hematocrit,
  Hemoglobin,
  Platelets,
  Mpv,
  Rbc,
  Lymphocytes,
  Mchc,
  Leukocytes,
  Basophils,
  Mch,
  Eosinophils,
  Mcv,
  Monocytes,
  Rbcdw,
};

const std::array<std::string_view, kFeatureCount>& feature_names() noexcept;
std::string_view name_of(Feature f) noexcept;
std::optional<Feature> feature_from_name(std::string_view name) noexcept;
constexpr std::size_t index_of(Feature f) noexcept { return static_cast<std::size_t>(f); }

enum class Location : std::uint8_t { Community, RegularWard, SemiIntensive, ICU };
inline constexpr std::array<Location, 4> kAllLocations{Location::Community, Location::RegularWard,
                                                       Location::SemiIntensive, Location::ICU};
std::string_view name_of(Location loc) noexcept;

enum class Label : std::uint8_t { Negative = 0, Positive = 1 };
std::string_view name_of(Label label) noexcept;

enum class PathogenResult : std::uint8_t { NotTested, Negative, Positive };

/// Canonical keys of the respiratory pathogen panel, and the display names used
/// in the pathogen tabulation.
const std::array<std::string_view, kPathogenCount>& pathogen_keys() noexcept;
const std::array<std::string_view, kPathogenCount>& pathogen_display_names() noexcept;

using FeatureVector = std::array<double, kFeatureCount>;
using PathogenPanel = std::array<PathogenResult, kPathogenCount>;

struct BloodCountRecord {
  std::string patient_id;
  std::optional<int> age_quantile;  // metadata only, never modeled
  Location location = Location::Community;
  Label label = Label::Negative;
  FeatureVector features{};
  std::optional<double> neutrophils;  // metadata only, reported separately
  std::optional<PathogenPanel> pathogen_panel;

  double operator[](Feature f) const noexcept { return features[index_of(f)]; }
  double& operator[](Feature f) noexcept { return features[index_of(f)]; }
};

using LocationSet = std::set<Location>;

struct Provenance {
  std::string source_digest;  // fnv1a64 hex of the source bytes
  std::string filter;
};

struct Cohort {
  std::vector<BloodCountRecord> records;
  std::vector<std::string> feature_manifest;
  LocationSet site_filter;
  Provenance provenance;

  std::size_t positives() const noexcept;
  std::size_t negatives() const noexcept;
  std::size_t size() const noexcept { return records.size(); }
};

/// Maps canonical field names to headers of a particular CSV snapshot, plus the
/// cell conventions for labels, admission flags and pathogen results.
struct ColumnMapping {
  std::string patient_id;
  std::optional<std::string> age_quantile;
  std::string label;
  std::string label_positive_value = "positive";
  std::string label_negative_value = "negative";
  std::string admission_regular_ward;
  std::string admission_semi_intensive;
  std::string admission_icu;
  std::vector<std::string> admission_true_values{"1", "1.0", "true", "TRUE", "yes"};
  std::vector<std::string> admission_false_values{"0", "0.0", "false", "FALSE", "no", ""};
  std::array<std::string, kFeatureCount> features;
  std::optional<std::string> neutrophils;
  std::array<std::optional<std::string>, kPathogenCount> pathogens;
  std::vector<std::string> pathogen_positive_values{"detected", "positive"};
  std::vector<std::string> pathogen_negative_values{"not_detected", "negative"};

  /// Header layout of the public hospital release.
  static ColumnMapping public_release();
  /// Header layout written by write_cohort_csv.
  static ColumnMapping canonical();

  static ColumnMapping from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct ParseResult {
  std::vector<BloodCountRecord> records;
  std::size_t rows_read = 0;
  std::size_t excluded_incomplete = 0;
  std::string source_digest;
};

/// Reads the hospital CSV. Rows missing any of the fourteen features are
/// counted in excluded_incomplete and dropped; other defects throw.
ParseResult parse_dataset(std::istream& csv, const ColumnMapping& mapping);

/// Records whose location is in `site_filter`. Throws EmptyCohort when none match.
Cohort select_cohort(std::span<const BloodCountRecord> records, const LocationSet& site_filter,
                     std::string source_digest = {});

struct Standardized {
  Eigen::VectorXd values;
  double mean = 0.0;
  double sd = 1.0;
};

/// Centres and scales to unit sample standard deviation (n-1 denominator).
Standardized standardize(const Eigen::Ref<const Eigen::VectorXd>& values);

/// Applies a previously fitted standardization to unseen values.
Eigen::VectorXd apply_standardization(const Eigen::Ref<const Eigen::VectorXd>& values, double mean, double sd);

struct LocationCounts {
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::size_t other_pathogen_positive = 0;  // patients with >= 1 positive panel result
  std::size_t with_panel = 0;
  std::size_t total() const noexcept { return positive + negative; }
};

struct CohortSummary {
  std::array<LocationCounts, 4> by_location{};
  LocationCounts overall;
  /// pathogen x location count of positive results.
  std::array<std::array<std::size_t, 4>, kPathogenCount> pathogen_positive{};

  std::size_t pathogen_total(std::size_t pathogen) const noexcept;
  std::size_t pathogen_location_total(std::size_t location) const noexcept;
  std::size_t pathogen_grand_total() const noexcept;
};

CohortSummary cohort_summary(std::span<const BloodCountRecord> records);

nlohmann::json to_json(const CohortSummary& summary);

/// Canonical re-serialization; parse_dataset with ColumnMapping::canonical()
/// reads it back unchanged.
void write_cohort_csv(std::ostream& out, std::span<const BloodCountRecord> records);

/// n x 14 design matrix in canonical feature order.
Eigen::MatrixXd feature_matrix(std::span<const BloodCountRecord> records);

/// 1 for Positive, 0 for Negative.
Eigen::VectorXi label_vector(std::span<const BloodCountRecord> records);

std::string fnv1a64_hex(std::string_view bytes);

}  // namespace hemascreen
