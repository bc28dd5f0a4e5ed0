// tensor.hpp
// Closed-form algebra on small d x d matrices stored row-major in raw
// double arrays (d = 2 or 3). No eigendecompositions anywhere; traces of
// powers are direct products.

#pragma once

#include <cmath>

namespace qgf {

inline double mat_trace(const double* q, int d) {
  double t = 0.0;
  for (int i = 0; i < d; ++i) t += q[i * d + i];
  return t;
}

// A:B = sum_ij A_ij B_ij
inline double mat_dot(const double* a, const double* b, int d) {
  double s = 0.0;
  for (int i = 0; i < d * d; ++i) s += a[i] * b[i];
  return s;
}

inline double mat_frob2(const double* q, int d) { return mat_dot(q, q, d); }
inline double mat_frob(const double* q, int d) { return std::sqrt(mat_frob2(q, d)); }

// tr(Q^2) = sum_ij Q_ij Q_ji
inline double mat_tr_sq(const double* q, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) s += q[i * d + j] * q[j * d + i];
  return s;
}

// tr(Q^3) = sum_ijk Q_ij Q_jk Q_ki
inline double mat_tr_cube(const double* q, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) s += q[i * d + j] * q[j * d + k] * q[k * d + i];
  return s;
}

inline void mat_mul(const double* a, const double* b, int d, double* out) {
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) s += a[i * d + k] * b[k * d + j];
      out[i * d + j] = s;
    }
}

inline double mat_asym_max(const double* q, int d) {
  double m = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      m = std::fmax(m, std::fabs(q[i * d + j] - q[j * d + i]));
  return m;
}

}  // namespace qgf
