#include "prime/error.hpp"

namespace prime {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParameters:
      return "invalid-parameters";
    case ErrorCode::kInvalidPrivacyBudget:
      return "invalid-privacy-budget";
    case ErrorCode::kRegularizationFailure:
      return "regularization-failure";
    case ErrorCode::kNumericalFailure:
      return "numerical-failure";
    case ErrorCode::kVertexHuntInfeasible:
      return "vertex-hunt-infeasible";
    case ErrorCode::kDegenerateGeometry:
      return "degenerate-geometry";
    case ErrorCode::kShapeMismatch:
      return "shape-mismatch";
    case ErrorCode::kParseError:
      return "parse-error";
    case ErrorCode::kIoError:
      return "io-error";
  }
  return "unknown-error";
}

}  // namespace prime
