#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace iimhhl {

enum class ErrorCode {
  NotHermitian,
  NoConvergence,
  Singular,
  DimensionMismatch,
  ZeroVector,
  NotUnitary,
  QubitIndexOutOfRange,
  AcceptanceTooLow,
  ClockNotUncomputed,
  NotPowerOfTwo,
  ClockNotZero,
  RotationOverflow,
  SpectrumOutOfRange,
  EmptyHistogram,
  DegenerateScale,
  MissingPrevious,
  Diverged,
  SpecParseError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::QubitIndexOutOfRange: return "QubitIndexOutOfRange";
    case ErrorCode::AcceptanceTooLow: return "AcceptanceTooLow";
    case ErrorCode::ClockNotUncomputed: return "ClockNotUncomputed";
    case ErrorCode::NotPowerOfTwo: return "NotPowerOfTwo";
    case ErrorCode::ClockNotZero: return "ClockNotZero";
    case ErrorCode::RotationOverflow: return "RotationOverflow";
    case ErrorCode::SpectrumOutOfRange: return "SpectrumOutOfRange";
    case ErrorCode::EmptyHistogram: return "EmptyHistogram";
    case ErrorCode::DegenerateScale: return "DegenerateScale";
    case ErrorCode::MissingPrevious: return "MissingPrevious";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::SpecParseError: return "SpecParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-status mapping) can branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace iimhhl
