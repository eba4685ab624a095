#pragma once

#include <stdexcept>
#include <string>

namespace rgasp {

/// Broad failure classes. The CLI maps each class onto an exit code.
enum class ErrorClass {
  kContract,   // caller violated a documented precondition
  kNumerical,  // a factorization or optimization failed
};

enum class ErrorCode {
  kInvalidArgument,
  kMissingTrend,
  kDegreesOfFreedom,
  kZeroScale,
  kDegenerateResponse,
  kNearSingularCorrelation,
  kFitFailure,
  kNumericalFailure,
  kFileNotFound,
  kParse,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  ErrorClass error_class() const noexcept {
    switch (code_) {
      case ErrorCode::kNearSingularCorrelation:
      case ErrorCode::kFitFailure:
      case ErrorCode::kNumericalFailure:
        return ErrorClass::kNumerical;
      default:
        return ErrorClass::kContract;
    }
  }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kMissingTrend: return "missing-trend";
    case ErrorCode::kDegreesOfFreedom: return "degrees-of-freedom";
    case ErrorCode::kZeroScale: return "zero-scale";
    case ErrorCode::kDegenerateResponse: return "degenerate-response";
    case ErrorCode::kNearSingularCorrelation: return "near-singular-correlation";
    case ErrorCode::kFitFailure: return "fit-failure";
    case ErrorCode::kNumericalFailure: return "numerical-failure";
    case ErrorCode::kFileNotFound: return "file-not-found";
    case ErrorCode::kParse: return "parse-error";
  }
  return "unknown";
}

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::kInvalidArgument, what);
}

}  // namespace rgasp
