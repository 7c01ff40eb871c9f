#include "fanbase/errors.hpp"

namespace fanbase {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::IndexOutOfBounds: return "IndexOutOfBounds";
    case ErrorCode::InvalidMode: return "InvalidMode";
    case ErrorCode::ColumnMismatch: return "ColumnMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::RankTooLarge: return "RankTooLarge";
    case ErrorCode::MaskDegenerate: return "MaskDegenerate";
    case ErrorCode::NonFiniteObjective: return "NonFiniteObjective";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::IncompatibleResolution: return "IncompatibleResolution";
    case ErrorCode::MissingSeries: return "MissingSeries";
    case ErrorCode::WindowOutOfRange: return "WindowOutOfRange";
    case ErrorCode::InsufficientContext: return "InsufficientContext";
    case ErrorCode::InsufficientHistory: return "InsufficientHistory";
    case ErrorCode::ZeroMeanActual: return "ZeroMeanActual";
    case ErrorCode::TooFewSlots: return "TooFewSlots";
    case ErrorCode::TooFewValues: return "TooFewValues";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace fanbase
