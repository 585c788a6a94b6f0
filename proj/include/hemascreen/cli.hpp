#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hemascreen/dataset.hpp"
#include "hemascreen/error.hpp"

namespace hemascreen::cli {

/// Stable process exit codes.
enum ExitCode : int { kOk = 0, kInputError = 2, kStatisticsError = 3, kModelingError = 4 };

ExitCode exit_code_for(ErrorKind kind) noexcept;

struct RunConfig {
  std::filesystem::path data;
  std::optional<std::filesystem::path> mapping;
  /// community, regular-ward or all-modeled; unset lets stats cover both sites.
  std::optional<std::string> cohort;
  std::vector<std::string> models{"rf"};
  /// Per-model hyperparameter overrides, keyed by model name.
  nlohmann::json hyperparameters = nlohmann::json::object();
  std::size_t folds = 10;
  std::size_t repeats = 1;
  std::uint64_t seed = 42;
  bool smote = false;
  std::filesystem::path out = "hemascreen-out";
  bool plots = true;
  std::size_t threads = 1;

  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  /// Throws InvalidArgument for unknown models or cohorts and folds < 2.
  void validate() const;
};

/// Site set of a named cohort.
LocationSet cohort_sites(const std::string& name);
const std::vector<std::string>& cohort_names();

/// Reads the data file, choosing the canonical layout when the header matches
/// it, otherwise the configured mapping or the public release layout.
ParseResult load_records(const RunConfig& config);

int cmd_ingest(const RunConfig& config, std::ostream& log);
int cmd_summary(const RunConfig& config, std::ostream& log);
int cmd_stats(const RunConfig& config, std::ostream& log);
int cmd_evaluate(const RunConfig& config, std::ostream& log);
int cmd_importance(const RunConfig& config, std::ostream& log);

/// Parses arguments (argv[0] excluded) and runs a subcommand. Errors are
/// written to `err` and mapped to exit codes.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hemascreen::cli
