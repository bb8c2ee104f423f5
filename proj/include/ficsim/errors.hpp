#ifndef FICSIM_ERRORS_HPP
#define FICSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ficsim {

// Base class so callers can catch everything from this library at once.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Jacobian (near-)rank loss: |det J| below the configured threshold.
// Simulation aborts rather than regularizing the kinematics.
struct SingularConfiguration : Error {
  explicit SingularConfiguration(const std::string& msg) : Error(msg) {}
};

// An implicit update-law system could not be solved to tolerance.
struct SolverFailure : Error {
  explicit SolverFailure(const std::string& msg) : Error(msg) {}
};

// NaN/Inf or magnitude blow-up detected anywhere in the loop.
struct NonFiniteState : Error {
  explicit NonFiniteState(const std::string& msg) : Error(msg) {}
};

struct IllConditioned : Error {
  explicit IllConditioned(const std::string& msg) : Error(msg) {}
};

// Period-delay lookup before one full period of history exists.
// Signals a sequencing bug in the caller, not a user error.
struct BufferUnderflow : Error {
  explicit BufferUnderflow(const std::string& msg) : Error(msg) {}
};

// Cost-functional window does not span exactly one period on the grid.
struct WindowMisaligned : Error {
  explicit WindowMisaligned(const std::string& msg) : Error(msg) {}
};

// An oracle that needs constant environment truth was asked about a
// time-varying one.
struct NonConstantEnvironment : Error {
  explicit NonConstantEnvironment(const std::string& msg) : Error(msg) {}
};

struct SingularStiffness : Error {
  explicit SingularStiffness(const std::string& msg) : Error(msg) {}
};

// Scenario file / configuration validation problem. Message carries the key
// path and the violated constraint.
struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

struct IoError : Error {
  explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace ficsim

#endif
