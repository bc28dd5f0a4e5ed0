// linsolve.hpp
// Matrix-free preconditioned conjugate gradients in the h-weighted inner
// product, plus a dense-assembly oracle over the per-node symmetric
// trace-free basis for small-grid verification.

#pragma once

#include <functional>
#include <vector>

#include "qgf/field.hpp"
#include "qgf/operators.hpp"

namespace qgf {

struct SolverConfig {
  double rel_tolerance = 1e-10;  // on ||apply(x)-rhs||_h / ||rhs||_h
  int max_iterations = 0;        // 0 -> 10*sqrt(#unknowns), at least 500
  enum class Precond { none, jacobi } preconditioner = Precond::jacobi;

  void validate() const {
    if (!(rel_tolerance > 0.0) || !(rel_tolerance < 1.0))
      throw ConfigError("solver: rel_tolerance must be in (0,1)");
    if (max_iterations < 0)
      throw ConfigError("solver: max_iterations must be >= 1 (or 0 for auto)");
  }
  int resolved_max_iterations(long unknowns) const;
};

struct CgResult {
  int iterations = 0;
  double residual = 0.0;  // true ||apply(x)-rhs||_h at exit
  int residual_increase_warnings = 0;
};

using ApplyFn = std::function<void(const Field&, Field&)>;

// Solves apply(x) = rhs for SPD `apply` on Dirichlet fields. `x` carries
// the initial guess in and the solution out. `jacobi_diag`, when given
// and enabled, holds the per-entry operator diagonal (same shape as x).
// Throws SolverError on iteration exhaustion or non-positive curvature.
CgResult cg_solve(const ApplyFn& apply, const Field& rhs, Field& x,
                  const SolverConfig& cfg, const Field* jacobi_diag = nullptr);

// Orthonormal basis of symmetric trace-free d x d matrices (2 in 2D,
// 5 in 3D), row-major, unit Frobenius norm.
int stf_basis_size(int dim);
void stf_basis_matrix(int dim, int which, double* out);

// Maps between a tensor field's interior values and the flattened
// coefficient vector over (interior node, basis index), node-major.
struct DenseSystem {
  int m = 0;                // number of unknowns
  std::vector<double> mat;  // row-major m x m
  GridSpec grid;
};
std::vector<double> field_to_coeffs(const Field& q);
void coeffs_to_field(const std::vector<double>& c, Field& q);

// Assembles apply() column by column over unit basis fields. Refuses
// grids with more than 6 interior nodes per axis.
DenseSystem dense_assemble(const ApplyFn& apply, const GridSpec& g);

// Cholesky solve of a dense SPD system; throws SolverError when a pivot
// is not positive.
std::vector<double> direct_solve(const DenseSystem& sys,
                                 const std::vector<double>& rhs);

double dense_max_asymmetry(const DenseSystem& sys);

// Smallest eigenvalue via inverse power iteration on the Cholesky
// factorization.
double dense_smallest_eigenvalue(const DenseSystem& sys, int iters = 200);

}  // namespace qgf
