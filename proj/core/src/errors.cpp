#include "mgsync/errors.hpp"

namespace mgsync {

std::string_view category_name(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::kConfig: return "config";
    case ErrorCategory::kDimension: return "dimension";
    case ErrorCategory::kNumerical: return "numerical";
    case ErrorCategory::kBuffer: return "buffer";
    case ErrorCategory::kInfeasible: return "infeasible";
    case ErrorCategory::kIo: return "io";
  }
  return "unknown";
}

int exit_code(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::kConfig: return 3;
    case ErrorCategory::kDimension: return 4;
    case ErrorCategory::kNumerical: return 5;
    case ErrorCategory::kBuffer: return 6;
    case ErrorCategory::kInfeasible: return 7;
    case ErrorCategory::kIo: return 8;
  }
  return 1;
}

}  // namespace mgsync
