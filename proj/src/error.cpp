#include "rsl/error.hpp"

namespace rsl {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::UnnormalizedWeights: return "UnnormalizedWeights";
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::IterationLimitExceeded: return "IterationLimitExceeded";
    case ErrorCode::NormOverflow: return "NormOverflow";
    case ErrorCode::SubdivisionLimit: return "SubdivisionLimit";
    case ErrorCode::NegativeOffDiagonal: return "NegativeOffDiagonal";
    case ErrorCode::RowSumNonzero: return "RowSumNonzero";
    case ErrorCode::NotIrreducible: return "NotIrreducible";
    case ErrorCode::SingularSolve: return "SingularSolve";
    case ErrorCode::StepsizeTooLarge: return "StepsizeTooLarge";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::BatchLargerThanDataset: return "BatchLargerThanDataset";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::InvalidLambdaSplit: return "InvalidLambdaSplit";
    case ErrorCode::FrictionTooSmall: return "FrictionTooSmall";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::UnknownClass: return "UnknownClass";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::DivergenceDetected: return "DivergenceDetected";
    case ErrorCode::MissingDataset: return "MissingDataset";
  }
  return "Unknown";
}

}  // namespace rsl
