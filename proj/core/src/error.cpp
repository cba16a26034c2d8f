#include "lumigeo/error.hpp"

namespace lumigeo {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "invalid-input";
    case ErrorCode::kEmptyInput: return "empty-input";
    case ErrorCode::kDegenerateGeometry: return "degenerate-geometry";
    case ErrorCode::kDuplicateProvenance: return "duplicate-provenance";
    case ErrorCode::kScheduling: return "scheduling";
    case ErrorCode::kNumeric: return "numeric";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace lumigeo
