#pragma once

#include <cstddef>
#include <exception>
#include <string>
#include <string_view>
#include <vector>

namespace gfsub {

enum class ErrorCode {
  // validation
  DimensionMismatch,
  ZeroVarianceChannel,
  IsolatedVertex,
  InvalidWeight,
  InvalidBand,
  EpochOutOfBounds,
  MalformedMeta,
  SizeMismatch,
  BadMarker,
  NonFiniteInput,
  EmptyBand,
  BadCutoff,
  MissingClass,
  SingleClassInput,
  TooFewTrials,
  ConfigInvalid,
  // numeric
  EigenFailure,
  NonFiniteOutput,
  DegenerateColumn,
  TraceUnderflow,
  RankDeficient,
  NonFiniteFeature,
  TrainingDidNotConverge,
  DegenerateModel,
  // i/o
  IoFailure,
};

enum class ErrorCategory { Validation, Numeric, Io };

std::string_view to_string(ErrorCode code);
ErrorCategory category_of(ErrorCode code);

/// Maps an error category onto the CLI exit code (1 validation, 2 numeric, 3 I/O).
int exit_code_for(ErrorCategory category);

/// Single exception type for the library. `indices` carries the offending
/// channel/marker/column index, or the discarded directions for RankDeficient.
class Error : public std::exception {
 public:
  Error(ErrorCode code, const std::string& message, std::vector<std::size_t> indices = {});

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }

  /// Same error with `context: ` prepended to the message.
  Error with_context(std::string_view context) const;

  const char* what() const noexcept override { return message_.c_str(); }

 private:
  ErrorCode code_;
  std::string message_;
  std::vector<std::size_t> indices_;
};

}  // namespace gfsub
