#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace uncertainty {

enum class ErrorCode {
  NonPowerOfTwo,
  EmptyInterval,
  ZeroNorm,
  NotNormalized,
  GridMismatch,
  InvalidParameter,
  NonPositiveSigma,
  BoundaryLeakage,
  NegativeQuantumNumber,
  EmptyTermList,
  BoundViolation,
  WeightSumError,
  CountInconsistency,
  IndexOutOfRange,
  DegenerateVariance,
  InsufficientSamples,
  NegativeSpread,
  ParseError,
  UnknownReference,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  /// The message without the leading code name.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

/// Scenario syntax failure at a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& message);

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace uncertainty
