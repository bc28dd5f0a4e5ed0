// field.hpp
// Dense node-centered grid fields. One class covers scalar fields
// (comps=1), vector fields (comps=dim) and Q-tensor fields
// (comps=dim*dim, row-major per node). Ghost entries are materialized
// and kept at zero for Dirichlet data, which keeps all stencils
// branch-free.

#pragma once

#include <vector>

#include "qgf/grid.hpp"

namespace qgf {

class Field {
 public:
  Field() = default;
  Field(const GridSpec& g, int comps)
      : grid_(g), comps_(comps), mx_(g.stor()), my_(g.stor()),
        mz_(g.dim == 3 ? g.stor() : 1) {
    g.validate();
    if (comps < 1) throw ArgumentError("Field: comps must be >= 1");
    v_.assign(static_cast<size_t>(mx_) * my_ * mz_ * comps_, 0.0);
  }

  static Field tensor(const GridSpec& g) { return Field(g, g.dim * g.dim); }
  static Field scalar(const GridSpec& g) { return Field(g, 1); }
  static Field vector(const GridSpec& g) { return Field(g, g.dim); }

  const GridSpec& grid() const { return grid_; }
  int comps() const { return comps_; }

  // Storage strides in doubles; x is the fastest axis.
  long sx() const { return comps_; }
  long sy() const { return static_cast<long>(mx_) * comps_; }
  long sz() const { return static_cast<long>(mx_) * my_ * comps_; }

  // Node (i,j,k) with each index in -1..N+2; k must be 0 in 2D.
  double* at(int i, int j, int k = 0) { return v_.data() + offset(i, j, k); }
  const double* at(int i, int j, int k = 0) const {
    return v_.data() + offset(i, j, k);
  }

  double& operator()(int i, int j, int k, int c) { return at(i, j, k)[c]; }
  double operator()(int i, int j, int k, int c) const { return at(i, j, k)[c]; }

  std::vector<double>& data() { return v_; }
  const std::vector<double>& data() const { return v_; }

  void fill(double value) { v_.assign(v_.size(), value); }

  // Zeroes every node with any axis index in {0, N+1} (boundary) or
  // {-1, N+2} (ghosts).
  void clear_boundary_and_ghosts();

  bool same_shape(const Field& o) const {
    return grid_.same(o.grid_) && comps_ == o.comps_;
  }

 private:
  size_t offset(int i, int j, int k) const {
    // +1 shifts -1..N+2 into storage range; z has no ghost plane in 2D.
    int kz = (grid_.dim == 3) ? k + 1 : 0;
    return ((static_cast<size_t>(kz) * my_ + (j + 1)) * mx_ + (i + 1)) * comps_;
  }

  GridSpec grid_;
  int comps_ = 0;
  int mx_ = 0, my_ = 0, mz_ = 0;
  std::vector<double> v_;
};

// Whole-array linear algebra. Fields must share shape; ghost entries are
// zero in all scheme fields so operating on the raw arrays is exact.
void field_copy(const Field& src, Field& dst);
void field_axpy(double alpha, const Field& x, Field& y);       // y += alpha x
void field_xpby(const Field& x, double beta, Field& y);        // y = x + beta y
void field_scale(Field& x, double alpha);
void field_lincomb(double a, const Field& x, double b, const Field& y,
                   Field& out);                                // out = a x + b y

}  // namespace qgf
