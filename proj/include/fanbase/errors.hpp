#pragma once

#include <stdexcept>
#include <string>

namespace fanbase {

/// Error categories raised by the library. Each maps to one documented
/// failure mode of an operation contract.
enum class ErrorCode {
  LengthMismatch,
  NonFiniteValue,
  IndexOutOfBounds,
  InvalidMode,
  ColumnMismatch,
  DimensionMismatch,
  RankTooLarge,
  MaskDegenerate,
  NonFiniteObjective,
  ParseError,
  EmptyDataset,
  IncompatibleResolution,
  MissingSeries,
  WindowOutOfRange,
  InsufficientContext,
  InsufficientHistory,
  ZeroMeanActual,
  TooFewSlots,
  TooFewValues,
  InvalidConfig,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace fanbase
