#pragma once

#include <stdexcept>
#include <string>

namespace lumigeo {

enum class ErrorCode {
  kInvalidInput,
  kEmptyInput,
  kDegenerateGeometry,
  kDuplicateProvenance,
  kScheduling,
  kNumeric,
  kIo,
};

const char* to_string(ErrorCode code);

/// Single exception type for the library. The code lets callers (the CLI in
/// particular) map failures to exit statuses without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace lumigeo
