#include "hagerlab/errors.hpp"

namespace hagerlab {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MultipleCritical: return "MultipleCritical";
    case ErrorCode::DegenerateStrip: return "DegenerateStrip";
    case ErrorCode::OutOfStrip: return "OutOfStrip";
    case ErrorCode::RegimeViolation: return "RegimeViolation";
    case ErrorCode::OnSpectrum: return "OnSpectrum";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::NoInteriorMax: return "NoInteriorMax";
    case ErrorCode::TooCloseToLine: return "TooCloseToLine";
    case ErrorCode::TooCloseToBoundary: return "TooCloseToBoundary";
    case ErrorCode::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::EigenvaluesNotRetained: return "EigenvaluesNotRetained";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace hagerlab
