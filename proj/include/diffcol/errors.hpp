#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace diffcol {

enum class ErrorCode {
  ZeroDirection,
  DegenerateInput,
  IndexOutOfRange,
  Unavailable,
  BackendMismatch,
  InvalidArgument,
  ParseError,
  FileNotFound,
};

const char* to_string(ErrorCode code);

/// Thrown on invalid input. Numerical trouble during a solve is reported
/// through `Flags` on the result instead.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// Non-fatal status bits attached to solver and estimator outputs.
enum Flag : std::uint32_t {
  kConverged = 0,
  kMaxIterations = 1u << 0,
  kMaxFaces = 1u << 1,
  kNumericalDegeneracy = 1u << 2,
  kTouching = 1u << 3,
  kSampleFailure = 1u << 4,
  kSingularSystem = 1u << 5,
  kLineSearchStall = 1u << 6,
};

using Flags = std::uint32_t;

/// Flags that indicate the numbers should not be trusted.
constexpr Flags kFailureFlags =
    kMaxIterations | kMaxFaces | kNumericalDegeneracy | kSampleFailure | kSingularSystem;

std::string describe_flags(Flags flags);

}  // namespace diffcol
