#include "gfsub/error.hpp"

namespace gfsub {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroVarianceChannel: return "ZeroVarianceChannel";
    case ErrorCode::IsolatedVertex: return "IsolatedVertex";
    case ErrorCode::InvalidWeight: return "InvalidWeight";
    case ErrorCode::InvalidBand: return "InvalidBand";
    case ErrorCode::EpochOutOfBounds: return "EpochOutOfBounds";
    case ErrorCode::MalformedMeta: return "MalformedMeta";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::BadMarker: return "BadMarker";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::EmptyBand: return "EmptyBand";
    case ErrorCode::BadCutoff: return "BadCutoff";
    case ErrorCode::MissingClass: return "MissingClass";
    case ErrorCode::SingleClassInput: return "SingleClassInput";
    case ErrorCode::TooFewTrials: return "TooFewTrials";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::NonFiniteOutput: return "NonFiniteOutput";
    case ErrorCode::DegenerateColumn: return "DegenerateColumn";
    case ErrorCode::TraceUnderflow: return "TraceUnderflow";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NonFiniteFeature: return "NonFiniteFeature";
    case ErrorCode::TrainingDidNotConverge: return "TrainingDidNotConverge";
    case ErrorCode::DegenerateModel: return "DegenerateModel";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::EigenFailure:
    case ErrorCode::NonFiniteOutput:
    case ErrorCode::DegenerateColumn:
    case ErrorCode::TraceUnderflow:
    case ErrorCode::RankDeficient:
    case ErrorCode::NonFiniteFeature:
    case ErrorCode::TrainingDidNotConverge:
    case ErrorCode::DegenerateModel:
      return ErrorCategory::Numeric;
    case ErrorCode::IoFailure:
      return ErrorCategory::Io;
    default:
      return ErrorCategory::Validation;
  }
}

int exit_code_for(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::Validation: return 1;
    case ErrorCategory::Numeric: return 2;
    case ErrorCategory::Io: return 3;
  }
  return 1;
}

Error::Error(ErrorCode code, const std::string& message, std::vector<std::size_t> indices)
    : code_(code),
      message_(std::string(to_string(code)) + ": " + message),
      indices_(std::move(indices)) {}

Error Error::with_context(std::string_view context) const {
  Error wrapped = *this;
  wrapped.message_ = std::string(context) + ": " + message_;
  return wrapped;
}

}  // namespace gfsub
