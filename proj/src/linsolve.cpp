#include "qgf/linsolve.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

namespace qgf {

int SolverConfig::resolved_max_iterations(long unknowns) const {
  if (max_iterations > 0) return max_iterations;
  long aut = static_cast<long>(10.0 * std::sqrt(static_cast<double>(unknowns)));
  return static_cast<int>(std::max<long>(aut, 500));
}

namespace {

void apply_inv_diag(const Field* diag, const Field& r, Field& z) {
  if (!diag) {
    field_copy(r, z);
    return;
  }
  const double* dv = diag->data().data();
  const double* rv = r.data().data();
  double* zv = z.data().data();
  const size_t n = r.data().size();
  for (size_t t = 0; t < n; ++t) zv[t] = (dv[t] != 0.0) ? rv[t] / dv[t] : rv[t];
}

}  // namespace

CgResult cg_solve(const ApplyFn& apply, const Field& rhs, Field& x,
                  const SolverConfig& cfg, const Field* jacobi_diag) {
  cfg.validate();
  if (!rhs.same_shape(x)) throw ArgumentError("cg_solve: shape mismatch");
  const Field* diag =
      (cfg.preconditioner == SolverConfig::Precond::jacobi) ? jacobi_diag
                                                            : nullptr;

  CgResult res;
  const double rhs_norm = norm_h(rhs);
  if (rhs_norm == 0.0) {
    x.fill(0.0);
    return res;
  }
  const double target = cfg.rel_tolerance * rhs_norm;
  const long unknowns = rhs.grid().interior_count() * rhs.comps();
  const int max_iters = cfg.resolved_max_iterations(unknowns);

  Field r(rhs.grid(), rhs.comps());
  Field z(rhs.grid(), rhs.comps());
  Field p(rhs.grid(), rhs.comps());
  Field ap(rhs.grid(), rhs.comps());

  apply(x, ap);
  field_lincomb(1.0, rhs, -1.0, ap, r);
  double rnorm = norm_h(r);
  if (rnorm <= target) {
    res.residual = rnorm;
    return res;
  }
  apply_inv_diag(diag, r, z);
  field_copy(z, p);
  double rz = inner_h(r, z);
  double prev_rnorm = rnorm;

  for (int it = 1; it <= max_iters; ++it) {
    apply(p, ap);
    double pap = inner_h(p, ap);
    if (!(pap > 0.0)) {
      std::ostringstream os;
      os << "cg_solve: non-positive curvature <p,Ap>_h=" << pap
         << " at iteration " << it << " (operator not SPD)";
      throw SolverError(os.str(), it, rnorm);
    }
    double alpha = rz / pap;
    field_axpy(alpha, p, x);
    field_axpy(-alpha, ap, r);
    rnorm = norm_h(r);
    if (rnorm > 1.1 * prev_rnorm) ++res.residual_increase_warnings;
    prev_rnorm = rnorm;
    if (rnorm <= target) {
      // Recursion drift check: confirm against the true residual.
      apply(x, ap);
      field_lincomb(1.0, rhs, -1.0, ap, r);
      rnorm = norm_h(r);
      prev_rnorm = rnorm;
      if (rnorm <= target) {
        res.iterations = it;
        res.residual = rnorm;
        return res;
      }
    }
    apply_inv_diag(diag, r, z);
    double rz_next = inner_h(r, z);
    double beta = rz_next / rz;
    rz = rz_next;
    field_xpby(z, beta, p);
  }
  std::ostringstream os;
  os << "cg_solve: no convergence after " << max_iters
     << " iterations, residual " << rnorm << " (target " << target << ")";
  throw SolverError(os.str(), max_iters, rnorm);
}

int stf_basis_size(int dim) { return dim == 2 ? 2 : 5; }

void stf_basis_matrix(int dim, int which, double* out) {
  const int dd = dim * dim;
  for (int t = 0; t < dd; ++t) out[t] = 0.0;
  const double is2 = 1.0 / std::sqrt(2.0);
  if (dim == 2) {
    switch (which) {
      case 0: out[0] = is2; out[3] = -is2; return;
      case 1: out[1] = is2; out[2] = is2; return;
    }
  } else {
    const double is6 = 1.0 / std::sqrt(6.0);
    switch (which) {
      case 0: out[0] = is2; out[4] = -is2; return;
      case 1: out[0] = is6; out[4] = is6; out[8] = -2.0 * is6; return;
      case 2: out[1] = is2; out[3] = is2; return;
      case 3: out[2] = is2; out[6] = is2; return;
      case 4: out[5] = is2; out[7] = is2; return;
    }
  }
  throw ArgumentError("stf_basis_matrix: bad index");
}

namespace {

template <typename NodeFn>
void for_interior(const GridSpec& g, NodeFn&& fn) {
  const int N = g.n_interior;
  const int klo = (g.dim == 3) ? 1 : 0, khi = (g.dim == 3) ? N : 0;
  for (int k = klo; k <= khi; ++k)
    for (int j = 1; j <= N; ++j)
      for (int i = 1; i <= N; ++i) fn(i, j, k);
}

}  // namespace

std::vector<double> field_to_coeffs(const Field& q) {
  const GridSpec& g = q.grid();
  const int d = g.dim;
  const int nb = stf_basis_size(d);
  double basis[5][9];
  for (int b = 0; b < nb; ++b) stf_basis_matrix(d, b, basis[b]);
  std::vector<double> c;
  c.reserve(g.interior_count() * nb);
  for_interior(g, [&](int i, int j, int k) {
    const double* p = q.at(i, j, k);
    for (int b = 0; b < nb; ++b) {
      double s = 0.0;
      for (int t = 0; t < d * d; ++t) s += basis[b][t] * p[t];
      c.push_back(s);
    }
  });
  return c;
}

void coeffs_to_field(const std::vector<double>& c, Field& q) {
  const GridSpec& g = q.grid();
  const int d = g.dim;
  const int nb = stf_basis_size(d);
  if (static_cast<long>(c.size()) != g.interior_count() * nb)
    throw ArgumentError("coeffs_to_field: size mismatch");
  double basis[5][9];
  for (int b = 0; b < nb; ++b) stf_basis_matrix(d, b, basis[b]);
  q.fill(0.0);
  size_t idx = 0;
  for_interior(g, [&](int i, int j, int k) {
    double* p = q.at(i, j, k);
    for (int b = 0; b < nb; ++b, ++idx)
      for (int t = 0; t < d * d; ++t) p[t] += c[idx] * basis[b][t];
  });
}

DenseSystem dense_assemble(const ApplyFn& apply, const GridSpec& g) {
  if (g.n_interior > 6)
    throw ArgumentError(
        "dense_assemble: grid too large (max 6 interior nodes per axis)");
  const int nb = stf_basis_size(g.dim);
  const int m = static_cast<int>(g.interior_count()) * nb;
  DenseSystem sys;
  sys.m = m;
  sys.grid = g;
  sys.mat.assign(static_cast<size_t>(m) * m, 0.0);
  Field e = Field::tensor(g);
  Field ae = Field::tensor(g);
  std::vector<double> unit(m, 0.0);
  for (int col = 0; col < m; ++col) {
    unit[col] = 1.0;
    coeffs_to_field(unit, e);
    unit[col] = 0.0;
    apply(e, ae);
    std::vector<double> ac = field_to_coeffs(ae);
    for (int row = 0; row < m; ++row)
      sys.mat[static_cast<size_t>(row) * m + col] = ac[row];
  }
  return sys;
}

namespace {

// In-place lower Cholesky of a copy; throws if a pivot fails.
std::vector<double> cholesky(const DenseSystem& sys) {
  const int m = sys.m;
  std::vector<double> L = sys.mat;
  for (int j = 0; j < m; ++j) {
    double diag = L[static_cast<size_t>(j) * m + j];
    for (int k = 0; k < j; ++k) {
      double v = L[static_cast<size_t>(j) * m + k];
      diag -= v * v;
    }
    if (!(diag > 0.0))
      throw SolverError("direct_solve: matrix is not positive definite", 0,
                        diag);
    double dj = std::sqrt(diag);
    L[static_cast<size_t>(j) * m + j] = dj;
    for (int i = j + 1; i < m; ++i) {
      double s = L[static_cast<size_t>(i) * m + j];
      for (int k = 0; k < j; ++k)
        s -= L[static_cast<size_t>(i) * m + k] *
             L[static_cast<size_t>(j) * m + k];
      L[static_cast<size_t>(i) * m + j] = s / dj;
    }
  }
  return L;
}

std::vector<double> chol_solve(const std::vector<double>& L, int m,
                               const std::vector<double>& rhs) {
  std::vector<double> y(m), x(m);
  for (int i = 0; i < m; ++i) {
    double s = rhs[i];
    for (int k = 0; k < i; ++k) s -= L[static_cast<size_t>(i) * m + k] * y[k];
    y[i] = s / L[static_cast<size_t>(i) * m + i];
  }
  for (int i = m - 1; i >= 0; --i) {
    double s = y[i];
    for (int k = i + 1; k < m; ++k)
      s -= L[static_cast<size_t>(k) * m + i] * x[k];
    x[i] = s / L[static_cast<size_t>(i) * m + i];
  }
  return x;
}

}  // namespace

std::vector<double> direct_solve(const DenseSystem& sys,
                                 const std::vector<double>& rhs) {
  if (static_cast<int>(rhs.size()) != sys.m)
    throw ArgumentError("direct_solve: rhs size mismatch");
  return chol_solve(cholesky(sys), sys.m, rhs);
}

double dense_max_asymmetry(const DenseSystem& sys) {
  double worst = 0.0;
  const int m = sys.m;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      worst = std::fmax(worst,
                        std::fabs(sys.mat[static_cast<size_t>(i) * m + j] -
                                  sys.mat[static_cast<size_t>(j) * m + i]));
  return worst;
}

double dense_smallest_eigenvalue(const DenseSystem& sys, int iters) {
  const int m = sys.m;
  std::vector<double> L = cholesky(sys);
  std::vector<double> v(m, 1.0);
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    std::vector<double> w = chol_solve(L, m, v);
    double nw = 0.0;
    for (double t : w) nw += t * t;
    nw = std::sqrt(nw);
    for (double& t : w) t /= nw;
    // Rayleigh quotient of A at w.
    double num = 0.0;
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int j = 0; j < m; ++j)
        s += sys.mat[static_cast<size_t>(i) * m + j] * w[j];
      num += w[i] * s;
    }
    if (it > 3 && std::fabs(num - lambda) <= 1e-12 * std::fabs(num)) {
      return num;
    }
    lambda = num;
    v = std::move(w);
  }
  return lambda;
}

}  // namespace qgf
