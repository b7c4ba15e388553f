#pragma once

#include <stdexcept>
#include <string>

namespace hagerlab {

enum class ErrorCode {
  MultipleCritical,
  DegenerateStrip,
  OutOfStrip,
  RegimeViolation,
  OnSpectrum,
  NoRoot,
  NoInteriorMax,
  TooCloseToLine,
  TooCloseToBoundary,
  TruncationTooSmall,
  NoConvergence,
  EigenvaluesNotRetained,
  ConfigError,
  IoError,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception carrying a typed failure kind; the CLI maps ConfigError to
/// exit 2 and every numerical kind to exit 1.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hagerlab
