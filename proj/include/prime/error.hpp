#pragma once

#include <stdexcept>
#include <string>

namespace prime {

enum class ErrorCode {
  kInvalidParameters,
  kInvalidPrivacyBudget,
  kRegularizationFailure,
  kNumericalFailure,
  kVertexHuntInfeasible,
  kDegenerateGeometry,
  kShapeMismatch,
  kParseError,
  kIoError,
};

const char* ErrorCodeName(ErrorCode code);

// All library failures are reported through this type. The code lets callers
// (the CLI in particular) map a failure onto a usage/data/numerical class
// without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace prime
