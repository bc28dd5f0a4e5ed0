#include "qgf/random_fields.hpp"

#include <cmath>

namespace qgf {

Field random_scalar_everywhere(const GridSpec& g, Rng& rng) {
  Field f = Field::scalar(g);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : f.data()) v = u(rng);
  return f;
}

namespace {

template <typename Fn>
void for_interior(const GridSpec& g, Fn&& fn) {
  const int N = g.n_interior;
  const int klo = (g.dim == 3) ? 1 : 0, khi = (g.dim == 3) ? N : 0;
  for (int k = klo; k <= khi; ++k)
    for (int j = 1; j <= N; ++j)
      for (int i = 1; i <= N; ++i) fn(i, j, k);
}

}  // namespace

Field random_scalar_dirichlet(const GridSpec& g, Rng& rng) {
  Field f = Field::scalar(g);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for_interior(g, [&](int i, int j, int k) { f.at(i, j, k)[0] = u(rng); });
  return f;
}

Field random_stf_dirichlet(const GridSpec& g, Rng& rng, double scale) {
  Field f = Field::tensor(g);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int d = g.dim;
  const int nb = stf_basis_size(d);
  double basis[5][9];
  for (int b = 0; b < nb; ++b) stf_basis_matrix(d, b, basis[b]);
  for_interior(g, [&](int i, int j, int k) {
    double* p = f.at(i, j, k);
    for (int b = 0; b < nb; ++b) {
      double c = scale * u(rng);
      for (int t = 0; t < d * d; ++t) p[t] += c * basis[b][t];
    }
  });
  return f;
}

Field random_tensor_dirichlet(const GridSpec& g, Rng& rng) {
  Field f = Field::tensor(g);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int nc = f.comps();
  for_interior(g, [&](int i, int j, int k) {
    double* p = f.at(i, j, k);
    for (int c = 0; c < nc; ++c) p[c] = u(rng);
  });
  return f;
}

void random_stf_matrix(int dim, Rng& rng, double fnorm, double* out) {
  std::normal_distribution<double> n(0.0, 1.0);
  const int nb = stf_basis_size(dim);
  double coeff[5];
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (int b = 0; b < nb; ++b) {
      coeff[b] = n(rng);
      norm2 += coeff[b] * coeff[b];
    }
  } while (norm2 == 0.0);
  double scale = fnorm / std::sqrt(norm2);
  double basis[5][9];
  for (int b = 0; b < nb; ++b) stf_basis_matrix(dim, b, basis[b]);
  for (int t = 0; t < dim * dim; ++t) out[t] = 0.0;
  for (int b = 0; b < nb; ++b)
    for (int t = 0; t < dim * dim; ++t) out[t] += scale * coeff[b] * basis[b][t];
}

}  // namespace qgf
