#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hemobnn {

enum class ErrorCode {
  kInvalidSpec,
  kSignalTooShort,
  kInvalidInterval,
  kInvalidWindow,
  kInsufficientData,
  kDimensionMismatch,
  kEmptyClass,
  kInvalidArgument,
  kMalformedFile,
  kVersionMismatch,
  kMissingInput,
  kConfig,
  kNumeric,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; the code distinguishes failure kinds
// so callers (and the CLI's exit-code mapping) can branch without RTTI.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace hemobnn
