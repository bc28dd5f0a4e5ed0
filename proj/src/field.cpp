#include "qgf/field.hpp"

#include <cstring>

namespace qgf {

void Field::clear_boundary_and_ghosts() {
  const int N = grid_.n_interior;
  const int dim = grid_.dim;
  const int klo = (dim == 3) ? -1 : 0;
  const int khi = (dim == 3) ? N + 2 : 0;
  for (int k = klo; k <= khi; ++k) {
    bool k_edge = (dim == 3) && (k <= 0 || k >= N + 1);
    for (int j = -1; j <= N + 2; ++j) {
      bool j_edge = (j <= 0 || j >= N + 1);
      if (k_edge || j_edge) {
        std::memset(at(-1, j, k), 0,
                    sizeof(double) * static_cast<size_t>(grid_.stor()) * comps_);
        continue;
      }
      for (int i : {-1, 0, N + 1, N + 2})
        std::memset(at(i, j, k), 0, sizeof(double) * comps_);
    }
  }
}

static void check_shapes(const Field& a, const Field& b) {
  if (!a.same_shape(b)) throw ArgumentError("field op: shape mismatch");
}

void field_copy(const Field& src, Field& dst) {
  check_shapes(src, dst);
  dst.data() = src.data();
}

void field_axpy(double alpha, const Field& x, Field& y) {
  check_shapes(x, y);
  const double* xi = x.data().data();
  double* yi = y.data().data();
  const size_t n = x.data().size();
  for (size_t t = 0; t < n; ++t) yi[t] += alpha * xi[t];
}

void field_xpby(const Field& x, double beta, Field& y) {
  check_shapes(x, y);
  const double* xi = x.data().data();
  double* yi = y.data().data();
  const size_t n = x.data().size();
  for (size_t t = 0; t < n; ++t) yi[t] = xi[t] + beta * yi[t];
}

void field_scale(Field& x, double alpha) {
  for (double& t : x.data()) t *= alpha;
}

void field_lincomb(double a, const Field& x, double b, const Field& y,
                   Field& out) {
  check_shapes(x, y);
  check_shapes(x, out);
  const double* xi = x.data().data();
  const double* yi = y.data().data();
  double* oi = out.data().data();
  const size_t n = x.data().size();
  for (size_t t = 0; t < n; ++t) oi[t] = a * xi[t] + b * yi[t];
}

}  // namespace qgf
