#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cvlc {

enum class ErrorCode {
  kInvalidScenario,
  kGapTooSmall,
  kInfeasible,
  kEvasionInfeasible,
  kPlanExhausted,
  kShapeMismatch,
  kEmptyResults,
  kInvalidConfig,
  kIo,
};

std::string_view ToString(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cvlc
