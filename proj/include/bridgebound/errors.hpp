#pragma once

#include <stdexcept>
#include <string>

namespace bridgebound {

/// Shape or support mismatch between operands (wrong dimension, different grids).
struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Mass found where the reference forbids it (zero column under a positive
/// target marginal, absolute-continuity violations that cannot be repaired).
struct SupportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Discrete problem exceeds a solver's exactness cap.
struct SizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parameter outside the admissible domain (non-SPD matrix, a <= 0, bad p).
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration input.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Iteration budget exhausted before the stopping rule fired.
struct ConvergenceError : std::runtime_error {
  double last_residual;
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), last_residual(residual) {}
};

}  // namespace bridgebound
