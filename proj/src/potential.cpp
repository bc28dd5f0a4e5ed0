#include "qgf/potential.hpp"

#include <cmath>
#include <sstream>

#include "qgf/tensor.hpp"

namespace qgf {

double bulk_energy(const double* q, int d, const ModelParams& p) {
  double t2 = mat_tr_sq(q, d);
  double t3 = mat_tr_cube(q, d);
  return 0.5 * p.a * t2 - (p.b / 3.0) * t3 + 0.25 * p.c * t2 * t2;
}

double r_of(const double* q, int d, const ModelParams& p) {
  double radicand = 2.0 * (bulk_energy(q, d, p) + p.A0);
  if (!(radicand > 0.0)) {
    std::ostringstream os;
    os << "r(Q): radicand " << radicand
       << " is not positive; A0=" << p.A0 << " is too small";
    throw QuadratizationError(os.str());
  }
  return std::sqrt(radicand);
}

void s_of(const double* q, int d, const ModelParams& p, double* out) {
  double qq[9];
  mat_mul(q, q, d, qq);
  double t2 = mat_tr_sq(q, d);
  double shift = t2 / d;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      int t = i * d + j;
      double bracket = qq[t] - ((i == j) ? shift : 0.0);
      out[t] = p.a * q[t] - p.b * bracket + p.c * t2 * q[t];
    }
}

void p_of(const double* q, int d, const ModelParams& p, double* out) {
  double r = r_of(q, d, p);
  s_of(q, d, p, out);
  double inv_r = 1.0 / r;
  for (int t = 0; t < d * d; ++t) out[t] *= inv_r;
}

Field extrapolate(const Field& qn, const Field& qnm1) {
  if (!qn.same_shape(qnm1))
    throw ArgumentError("extrapolate: field shapes differ");
  Field out(qn.grid(), qn.comps());
  field_lincomb(1.5, qn, -0.5, qnm1, out);
  return out;
}

Field p_bar(const Field& qn, const Field& qnm1, const ModelParams& p) {
  Field bar = extrapolate(qn, qnm1);
  const GridSpec& g = bar.grid();
  const int d = g.dim;
  const int N = g.n_interior;
  Field out(g, d * d);
  const int klo = (d == 3) ? 0 : 0;
  const int khi = (d == 3) ? N + 1 : 0;
  for (int k = klo; k <= khi; ++k)
    for (int j = 0; j <= N + 1; ++j)
      for (int i = 0; i <= N + 1; ++i) {
        try {
          p_of(bar.at(i, j, k), d, p, out.at(i, j, k));
        } catch (const QuadratizationError& e) {
          std::ostringstream os;
          os << e.what() << " at node (" << i << "," << j;
          if (d == 3) os << "," << k;
          os << ")";
          throw QuadratizationError(os.str());
        }
      }
  return out;
}

}  // namespace qgf
