#pragma once

#include <stdexcept>
#include <string>

namespace ilcc {

/// Domain error taxonomy. The CLI prints the code name and exits 1.
enum class ErrorCode {
  ZeroNorm,
  NonPositiveRange,
  DegenerateGeometry,
  BoardNotFound,
  UnimodalIntensity,
  NonFiniteCost,
  FitRejected,
  BadCorners,
  InsufficientCorrespondences,
  NoConvergence,
  NoPointsInside,
  CountMismatch,
  EmptyScan,
  BadInput,
  IoError,
};

inline const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroNorm: return "ZeroNorm";
    case ErrorCode::NonPositiveRange: return "NonPositiveRange";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::BoardNotFound: return "BoardNotFound";
    case ErrorCode::UnimodalIntensity: return "UnimodalIntensity";
    case ErrorCode::NonFiniteCost: return "NonFiniteCost";
    case ErrorCode::FitRejected: return "FitRejected";
    case ErrorCode::BadCorners: return "BadCorners";
    case ErrorCode::InsufficientCorrespondences: return "InsufficientCorrespondences";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NoPointsInside: return "NoPointsInside";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::EmptyScan: return "EmptyScan";
    case ErrorCode::BadInput: return "BadInput";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }
  const char* name() const { return error_name(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace ilcc
