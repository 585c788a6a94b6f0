#include "hemascreen/error.hpp"

namespace hemascreen {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::MalformedHeader: return "MalformedHeader";
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::ConflictingAdmission: return "ConflictingAdmission";
    case ErrorKind::DuplicatePatient: return "DuplicatePatient";
    case ErrorKind::EmptyCohort: return "EmptyCohort";
    case ErrorKind::DegenerateFeature: return "DegenerateFeature";
    case ErrorKind::BadMapping: return "BadMapping";
    case ErrorKind::Io: return "Io";
    case ErrorKind::EmptySample: return "EmptySample";
    case ErrorKind::SingleClassCohort: return "SingleClassCohort";
    case ErrorKind::TooFewPerClass: return "TooFewPerClass";
    case ErrorKind::TooFewMinority: return "TooFewMinority";
    case ErrorKind::BadNeighborCount: return "BadNeighborCount";
    case ErrorKind::SingleClass: return "SingleClass";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::ManifestMismatch: return "ManifestMismatch";
    case ErrorKind::UnsupportedModel: return "UnsupportedModel";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace hemascreen
