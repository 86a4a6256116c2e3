#include "hemobnn/errors.hpp"

namespace hemobnn {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidSpec: return "invalid-spec";
    case ErrorCode::kSignalTooShort: return "signal-too-short";
    case ErrorCode::kInvalidInterval: return "invalid-interval";
    case ErrorCode::kInvalidWindow: return "invalid-window";
    case ErrorCode::kInsufficientData: return "insufficient-data";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kEmptyClass: return "empty-class";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kMalformedFile: return "malformed-file";
    case ErrorCode::kVersionMismatch: return "version-mismatch";
    case ErrorCode::kMissingInput: return "missing-input";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kNumeric: return "numeric";
  }
  return "unknown";
}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, std::string(to_string(code)) + ": " + message);
}

}  // namespace hemobnn
