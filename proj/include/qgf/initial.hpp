// initial.hpp
// Projection of continuous initial data onto the grid by cell averages
// over the h-cubes centered on interior nodes. Boundary and ghost nodes
// get Q = 0 and r = r(0) = sqrt(2 A0).

#pragma once

#include <functional>
#include <utility>

#include "qgf/field.hpp"
#include "qgf/potential.hpp"

namespace qgf {

// Writes the dim x dim matrix Q0(x) into `out` (row-major). The z
// coordinate is ignored in 2D.
using MatrixFn = std::function<void(double x, double y, double z, double* out)>;

struct InitialData {
  Field q;  // tensor field
  Field r;  // scalar field
};

// Tensor-product Gauss-Legendre cell averages; `points_per_axis` is 3 by
// default (more than enough for the scheme's second order) and is exposed
// so tests can build dense-quadrature reference averages.
InitialData project_initial(const GridSpec& g, const ModelParams& p,
                            const MatrixFn& q0, int points_per_axis = 3);

}  // namespace qgf
