#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qnl {

enum class ErrorCode {
  InvalidDims,
  InvalidResolution,
  ShapeMismatch,
  GridMismatch,
  AxisOutOfRange,
  NonZeroMean,
  NotGradient,
  InvalidLambda,
  InvalidTimeStep,
  InvalidParams,
  MassDefect,
  DegenerateDensity,
  NonpositiveTemperature,
  BlowUp,
  DensityNotPositive,
  NotDivergenceFree,
  InsufficientData,
  TimeGridMismatch,
  InvalidConfig,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Every failure in the library is reported as an Error carrying a code,
/// so callers (the sweep in particular) can record a failed row and go on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qnl
