// errors.hpp
// Error categories thrown across the library. Everything derives from
// qgf::Error so the CLI can map categories to exit codes.

#pragma once

#include <stdexcept>
#include <string>

namespace qgf {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad call arguments (axis out of range, grid mismatch, non-nested grids).
struct ArgumentError : Error {
  using Error::Error;
};

// Invalid or inconsistent run configuration.
struct ConfigError : Error {
  using Error::Error;
};

// The radicand of r(Q) was non-positive; A0 is too small for the data.
struct QuadratizationError : Error {
  using Error::Error;
};

// Linear solver failure (non-convergence or loss of positive definiteness).
struct SolverError : Error {
  SolverError(const std::string& msg, int iters, double residual)
      : Error(msg), iterations(iters), residual(residual) {}
  int iterations = 0;
  double residual = 0.0;
};

// Structural invariant (trace/symmetry) drifted past tolerance.
struct IntegrityError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace qgf
