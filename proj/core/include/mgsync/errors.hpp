#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mgsync {

// Machine-readable error categories. The CLI maps each to a distinct exit code.
enum class ErrorCategory {
  kConfig,     // invalid scenario / topology / gains
  kDimension,  // matrix shapes do not conform
  kNumerical,  // non-finite state, failed factorization
  kBuffer,     // history buffer undersized or queried out of range
  kInfeasible, // LMI synthesis found no certificate
  kIo,         // unreadable / unwritable file
};

std::string_view category_name(ErrorCategory c) noexcept;
int exit_code(ErrorCategory c) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  [[nodiscard]] ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory c, const std::string& what) { throw Error(c, what); }

}  // namespace mgsync
