#pragma once

#include <stdexcept>
#include <string>

namespace nonlocal {

// Base for all library failures so callers can catch one type.
struct error : std::runtime_error {
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

// A parameter violates a documented precondition (s outside (0,1), ...).
struct invalid_parameter : error {
  using error::error;
};

// Quadrature could not reach the requested tolerance within budget.
struct quadrature_failure : error {
  using error::error;
};

// A tail integral fails to converge (weight too weak for the integrand).
struct tail_not_integrable : error {
  using error::error;
};

// Principal-value integral diverges at the evaluation point.
struct pv_divergence : error {
  using error::error;
};

// Test function support leaks outside the admissible region.
struct support_violation : error {
  using error::error;
};

// Increment too large for the identity's validity region (|z| >= R).
struct shift_too_large : error {
  using error::error;
};

// Embedding gap s - r is zero: the constant [(s-r)p]^{-1/p} degenerates.
struct degenerate_gap : error {
  using error::error;
};

// Stiffness matrix failed the SPD factorization.
struct singular_system : error {
  using error::error;
};

// Requested ball is not compactly contained in the domain.
struct ball_not_compactly_contained : error {
  using error::error;
};

// Fit window spans fewer than the minimum number of dyadic levels.
struct window_too_narrow : error {
  using error::error;
};

// Parameter outside the validity range of the requested computation.
struct parameter_out_of_range : error {
  using error::error;
};

// Malformed or inconsistent run configuration.
struct config_error : error {
  using error::error;
};

}  // namespace nonlocal
