// random_fields.hpp
// Seeded random grid-field generators for property tests and the verify
// battery.

#pragma once

#include <random>

#include "qgf/field.hpp"
#include "qgf/linsolve.hpp"

namespace qgf {

using Rng = std::mt19937_64;

// Uniform(-1,1) values at every storage node including boundary and
// ghosts (used where only one side of an identity needs zero boundaries).
Field random_scalar_everywhere(const GridSpec& g, Rng& rng);

// Uniform(-1,1) values at interior nodes; boundary and ghosts zero.
Field random_scalar_dirichlet(const GridSpec& g, Rng& rng);

// Symmetric trace-free tensor field, random in the per-node orthonormal
// basis at interior nodes, zero boundary/ghosts. `scale` multiplies the
// coefficients.
Field random_stf_dirichlet(const GridSpec& g, Rng& rng, double scale = 1.0);

// General (non-symmetric, non-trace-free) tensor field, interior only.
Field random_tensor_dirichlet(const GridSpec& g, Rng& rng);

// Random symmetric trace-free d x d matrix with Frobenius norm exactly
// `fnorm`, written to out.
void random_stf_matrix(int dim, Rng& rng, double fnorm, double* out);

}  // namespace qgf
