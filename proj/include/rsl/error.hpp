#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rsl {

/// Every failure the library reports carries one of these codes.
enum class ErrorCode {
  // numerics
  NegativeWeight,
  UnnormalizedWeights,
  NonFiniteEntry,
  IterationLimitExceeded,
  NormOverflow,
  SubdivisionLimit,
  // ctmc
  NegativeOffDiagonal,
  RowSumNonzero,
  NotIrreducible,
  SingularSolve,
  StepsizeTooLarge,
  // models
  NotPositiveDefinite,
  BatchLargerThanDataset,
  // samplers
  NonFiniteState,
  // theory
  InvalidLambdaSplit,
  FrictionTooSmall,
  // metrics
  NotPSD,
  TooFewSamples,
  DimensionMismatch,
  // data
  FileNotFound,
  ParseError,
  SchemaMismatch,
  UnknownClass,
  // cli
  ConfigError,
  DivergenceDetected,
  MissingDataset,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rsl
