#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hemascreen {

enum class ErrorKind {
  // input
  MalformedHeader,
  MalformedRow,
  ConflictingAdmission,
  DuplicatePatient,
  EmptyCohort,
  DegenerateFeature,
  BadMapping,
  Io,
  // statistics
  EmptySample,
  SingleClassCohort,
  // resampling
  TooFewPerClass,
  TooFewMinority,
  BadNeighborCount,
  // modeling
  SingleClass,
  NonFinite,
  ManifestMismatch,
  UnsupportedModel,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Row-level parse failure; row_index is the 1-based data row (header excluded).
class RowError : public Error {
 public:
  RowError(ErrorKind kind, std::size_t row_index, const std::string& message)
      : Error(kind, "row " + std::to_string(row_index) + ": " + message), row_(row_index) {}

  std::size_t row_index() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace hemascreen
