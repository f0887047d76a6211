#pragma once

#include <stdexcept>
#include <string>

namespace itc {

/// Inputs disagree in particle count or state dimension.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A control or argument violates an admissibility constraint
/// (membership in the control set, budget, time window).
struct ConstraintError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Scenario configuration is invalid (unknown kind, inadmissible parameters).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// An integrator produced a non-finite state.
struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace itc
