// grid.hpp
// Uniform tensor-product grid over a cube/square with one ghost ring.
//
// Node indices along each axis run -1..N+2: nodes 0 and N+1 are the
// Dirichlet boundary, -1 and N+2 the ghost ring, 1..N the interior.
// Node i sits at origin + i*h and h = side/(N+1).

#pragma once

#include <array>
#include <cmath>

#include "qgf/errors.hpp"

namespace qgf {

struct GridSpec {
  int dim = 2;        // 2 or 3
  int n_interior = 0; // N
  double h = 0.0;     // side/(N+1)
  double side = 0.0;
  std::array<double, 3> origin{0.0, 0.0, 0.0};

  // `cells` is the resolution quoted in run configs: cells = N+1 = side/h.
  static GridSpec cube(int dim, int cells, double side = 1.0,
                       std::array<double, 3> origin = {0.0, 0.0, 0.0}) {
    if (dim != 2 && dim != 3)
      throw ArgumentError("GridSpec: dim must be 2 or 3");
    if (cells < 2) throw ArgumentError("GridSpec: need at least 2 cells");
    if (!(side > 0.0)) throw ArgumentError("GridSpec: side must be positive");
    GridSpec g;
    g.dim = dim;
    g.n_interior = cells - 1;
    g.side = side;
    g.h = side / cells;
    g.origin = origin;
    return g;
  }

  int cells() const { return n_interior + 1; }
  int nodes() const { return n_interior + 2; }  // real nodes 0..N+1
  int stor() const { return n_interior + 4; }   // including ghosts

  long node_count() const {
    long n = 1;
    for (int a = 0; a < dim; ++a) n *= nodes();
    return n;
  }
  long interior_count() const {
    long n = 1;
    for (int a = 0; a < dim; ++a) n *= n_interior;
    return n;
  }

  double coord(int i, int axis) const { return origin[axis] + i * h; }

  bool same(const GridSpec& o) const {
    return dim == o.dim && n_interior == o.n_interior && h == o.h &&
           side == o.side && origin == o.origin;
  }

  void validate() const {
    if (dim != 2 && dim != 3) throw ArgumentError("GridSpec: dim must be 2 or 3");
    if (n_interior < 1) throw ArgumentError("GridSpec: no interior nodes");
    if (!(h > 0.0)) throw ArgumentError("GridSpec: h must be positive");
    // (N+1)*h must reproduce the side length to ulp scale.
    double err = std::fabs((n_interior + 1) * h - side);
    if (err > 8.0 * side * 2.220446049250313e-16)
      throw ArgumentError("GridSpec: (N+1)*h does not match side length");
  }
};

}  // namespace qgf
