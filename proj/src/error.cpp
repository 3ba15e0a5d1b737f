#include "uncertainty/error.hpp"

namespace uncertainty {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonPowerOfTwo: return "NonPowerOfTwo";
    case ErrorCode::EmptyInterval: return "EmptyInterval";
    case ErrorCode::ZeroNorm: return "ZeroNorm";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::NonPositiveSigma: return "NonPositiveSigma";
    case ErrorCode::BoundaryLeakage: return "BoundaryLeakage";
    case ErrorCode::NegativeQuantumNumber: return "NegativeQuantumNumber";
    case ErrorCode::EmptyTermList: return "EmptyTermList";
    case ErrorCode::BoundViolation: return "BoundViolation";
    case ErrorCode::WeightSumError: return "WeightSumError";
    case ErrorCode::CountInconsistency: return "CountInconsistency";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::NegativeSpread: return "NegativeSpread";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownReference: return "UnknownReference";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

ParseError::ParseError(int line, int column, const std::string& message)
    : Error(ErrorCode::ParseError,
            "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

}  // namespace uncertainty
