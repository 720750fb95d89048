#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace xmodel {

enum class ErrorCode {
  kInvalidParams,
  kOutsideRegime,
  kNonConverged,
  kSingularBoundary,
  kDriftTestMismatch,
  kNotRecurrent,
  kStepTooLarge,
  kIllegalState,
  kNotInA,
  kConfigParse,
  kIo,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-checkable code. Thrown by every fallible
/// operation in the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }
  /// The message without the leading code.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace xmodel
