#include "xmodel/error.hpp"

namespace xmodel {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParams: return "INVALID_PARAMS";
    case ErrorCode::kOutsideRegime: return "OUTSIDE_REGIME";
    case ErrorCode::kNonConverged: return "NON_CONVERGED";
    case ErrorCode::kSingularBoundary: return "SINGULAR_BOUNDARY";
    case ErrorCode::kDriftTestMismatch: return "DRIFT_TEST_MISMATCH";
    case ErrorCode::kNotRecurrent: return "NOT_RECURRENT";
    case ErrorCode::kStepTooLarge: return "STEP_TOO_LARGE";
    case ErrorCode::kIllegalState: return "ILLEGAL_STATE";
    case ErrorCode::kNotInA: return "NOT_IN_A";
    case ErrorCode::kConfigParse: return "CONFIG_PARSE";
    case ErrorCode::kIo: return "IO";
  }
  return "UNKNOWN";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

}  // namespace xmodel
