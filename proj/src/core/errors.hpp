#pragma once

#include <stdexcept>
#include <string>

namespace lor {

// Error taxonomy shared by all modules. Every condition that a caller can
// meaningfully react to gets its own type; the C API maps these to codes.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidArgument : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

// spacetime
struct NonCausalSegment : Error {
  using Error::Error;
};
struct ConditionViolated : Error {
  using Error::Error;
};
struct NonPositiveConformalFactor : Error {
  using Error::Error;
};

// flow
struct SingularMetric : Error {
  using Error::Error;
};
struct StepUnderflow : Error {
  using Error::Error;
};

// reach
struct EmptyStencil : Error {
  using Error::Error;
};
struct GridMismatch : Error {
  using Error::Error;
};

// stable
struct ZeroLengthPath : Error {
  using Error::Error;
};
struct OutsideCone : Error {
  using Error::Error;
};
struct NotInDualCone : Error {
  using Error::Error;
};

// measures
struct EmptyPath : Error {
  using Error::Error;
};
struct NonCausalCell : Error {
  using Error::Error;
};

// hedlund
struct NotConstructible : Error {
  using Error::Error;
};

// graphcheck
struct NotCrossingConfiguration : Error {
  using Error::Error;
};

// cli
struct MissingReport : Error {
  using Error::Error;
};

}  // namespace lor
