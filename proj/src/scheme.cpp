#include "qgf/scheme.hpp"

#include <cmath>
#include <sstream>

#include "qgf/operators.hpp"
#include "qgf/tensor.hpp"

namespace qgf {

SchemeState make_state(Field q0, Field r0, const ModelParams& p) {
  p.validate();
  if (q0.grid().dim != p.dim)
    throw ArgumentError("make_state: params dimension != grid dimension");
  if (q0.comps() != p.dim * p.dim || r0.comps() != 1)
    throw ArgumentError("make_state: field component counts are wrong");
  if (!q0.grid().same(r0.grid()))
    throw ArgumentError("make_state: Q and r grids differ");
  SchemeState st;
  st.q_prev = q0;  // Q^{-1} := Q^0 for the first extrapolation
  st.q = std::move(q0);
  st.r = std::move(r0);
  st.params = p;
  return st;
}

namespace {

// Effective compact-laplacian coefficient inside A and F. In 2D alpha_h
// is the compact laplacian, so its quarter-weight folds in here; in 3D
// the central-difference alpha is applied separately.
double lap_coeff(const ModelParams& p) {
  double c = 0.5 * p.M * p.L1;
  if (p.dim == 2) c += 0.25 * p.M * (p.L2 + p.L3);
  return c;
}

double alpha_coeff(const ModelParams& p) {
  return (p.dim == 3) ? 0.25 * p.M * (p.L2 + p.L3) : 0.0;
}

// out(node) = id_c * x + lap_c * lap_h(x) + pb_c * (pbar:x) pbar + add
// fused over interior nodes; `add` supplies an optional extra field
// (used for -M r pbar in F), may be null.
void fused_core(const Field& x, const Field& pbar, double id_c, double lap_c,
                double pb_c, const Field* scal, double scal_c, Field& out) {
  const GridSpec& g = x.grid();
  const int d = g.dim;
  const int nc = d * d;
  const int N = g.n_interior;
  const double inv_h2 = 1.0 / (g.h * g.h);
  const long sx = x.sx(), sy = x.sy(), sz = x.sz();
  const int klo = (d == 3) ? 1 : 0, khi = (d == 3) ? N : 0;
  for (int k = klo; k <= khi; ++k)
    for (int j = 1; j <= N; ++j) {
      const double* p = x.at(1, j, k);
      const double* pb = pbar.at(1, j, k);
      const double* sc = scal ? scal->at(1, j, k) : nullptr;
      double* o = out.at(1, j, k);
      for (int i = 1; i <= N; ++i, p += nc, pb += nc, o += nc) {
        double dot = 0.0;
        for (int c = 0; c < nc; ++c) dot += pb[c] * p[c];
        const double pbw = pb_c * dot;
        const double sw = sc ? scal_c * sc[0] : 0.0;
        for (int c = 0; c < nc; ++c) {
          double lap = p[c + sx] + p[c - sx] + p[c + sy] + p[c - sy] -
                       2.0 * d * p[c];
          if (d == 3) lap += p[c + sz] + p[c - sz];
          o[c] = id_c * p[c] + lap_c * lap * inv_h2 + pbw * pb[c] + sw * pb[c];
        }
        if (sc) ++sc;
      }
    }
  out.clear_boundary_and_ghosts();
}

// out += coef * alpha_central(x) on interior nodes. Mirrors
// alpha_h_central including the exact-trace deflation.
void add_scaled_alpha(const Field& x, double coef, Field& u, Field& out) {
  const GridSpec& g = x.grid();
  const int d = g.dim;
  const int N = g.n_interior;
  const double inv_2h = 0.5 / g.h;
  const long strides[3] = {x.sx(), x.sy(), x.sz()};
  const int klo = (d == 3) ? 0 : 0, khi = (d == 3) ? N + 1 : 0;
  for (int k = klo; k <= khi; ++k)
    for (int j = 0; j <= N + 1; ++j) {
      const double* p = x.at(0, j, k);
      double* up = u.at(0, j, k);
      for (int i = 0; i <= N + 1; ++i, p += d * d, up += d)
        for (int s = 0; s < d; ++s) {
          double acc = 0.0;
          for (int b = 0; b < d; ++b) {
            const long st = strides[b];
            acc += (p[s * d + b + st] - p[s * d + b - st]) * inv_2h;
          }
          up[s] = acc;
        }
    }
  const long us[3] = {u.sx(), u.sy(), u.sz()};
  const int kin_lo = (d == 3) ? 1 : 0, kin_hi = (d == 3) ? N : 0;
  const double tf = 2.0 / d;
  for (int k = kin_lo; k <= kin_hi; ++k)
    for (int j = 1; j <= N; ++j) {
      const double* up = u.at(1, j, k);
      double* o = out.at(1, j, k);
      for (int i = 1; i <= N; ++i, up += d, o += d * d) {
        double du[3][3];
        for (int w = 0; w < d; ++w) {
          const long st = us[w];
          for (int s = 0; s < d; ++s)
            du[w][s] = (up[s + st] - up[s - st]) * inv_2h;
        }
        double trace = 0.0;
        for (int b = 0; b < d; ++b) trace += du[b][b];
        double diag_sum = 0.0;
        for (int w = 0; w < d; ++w)
          for (int s = 0; s < d; ++s) {
            if (w != s) {
              o[w * d + s] += coef * (du[w][s] + du[s][w]);
            } else if (w < d - 1) {
              double v = 2.0 * du[w][w] - tf * trace;
              o[w * d + s] += coef * v;
              diag_sum += v;
            } else {
              o[w * d + s] += coef * (-diag_sum);
            }
          }
      }
    }
}

}  // namespace

void apply_A(const Field& x, const Field& pbar, const ModelParams& p,
             Field& out, Field* u_ws) {
  fused_core(x, pbar, 1.0 / p.dt, -lap_coeff(p), 0.5 * p.M, nullptr, 0.0, out);
  double ac = alpha_coeff(p);
  if (ac != 0.0) {
    Field local;
    Field* u = u_ws;
    if (!u) {
      local = Field::vector(x.grid());
      u = &local;
    }
    add_scaled_alpha(x, -ac, *u, out);
  }
}

Field apply_A(const Field& x, const Field& pbar, const ModelParams& p) {
  Field out(x.grid(), x.comps());
  apply_A(x, pbar, p, out);
  return out;
}

void build_F(const SchemeState& st, const Field& pbar, Field& out,
             Field* u_ws) {
  const ModelParams& p = st.params;
  fused_core(st.q, pbar, 1.0 / p.dt, lap_coeff(p), 0.5 * p.M, &st.r, -p.M,
             out);
  double ac = alpha_coeff(p);
  if (ac != 0.0) {
    Field local;
    Field* u = u_ws;
    if (!u) {
      local = Field::vector(st.q.grid());
      u = &local;
    }
    add_scaled_alpha(st.q, ac, *u, out);
  }
}

double energy(const Field& q, const Field& r, const ModelParams& p) {
  double e = 0.5 * p.L1 * grad_norm_h_sq(q) + 0.5 * norm_h_sq(r);
  if (p.L2 + p.L3 != 0.0) e += 0.5 * (p.L2 + p.L3) * div_norm_h_sq(q);
  return e;
}

Diagnostics diagnostics(const SchemeState& st) {
  Diagnostics diag;
  StructureDrift drift = structure_drift(st.q);
  diag.trace_drift = drift.trace;
  diag.sym_drift = drift.asym;
  const GridSpec& g = st.q.grid();
  const int d = g.dim;
  const int N = g.n_interior;
  double min_r = st.r.at(0, 0, 0)[0];
  double max_q = 0.0;
  const int klo = 0, khi = (d == 3) ? N + 1 : 0;
  for (int k = klo; k <= khi; ++k)
    for (int j = 0; j <= N + 1; ++j)
      for (int i = 0; i <= N + 1; ++i)
        min_r = std::fmin(min_r, st.r.at(i, j, k)[0]);
  const int kin_lo = (d == 3) ? 1 : 0, kin_hi = (d == 3) ? N : 0;
  for (int k = kin_lo; k <= kin_hi; ++k)
    for (int j = 1; j <= N; ++j)
      for (int i = 1; i <= N; ++i)
        max_q = std::fmax(max_q, mat_frob(st.q.at(i, j, k), d));
  diag.min_r = min_r;
  diag.max_q_frob = max_q;
  return diag;
}

Integrator::Integrator(SchemeState st, SolverConfig cfg, double integrity_tol)
    : st_(std::move(st)), cfg_(cfg), integrity_tol_(integrity_tol) {
  st_.params.validate();
  cfg_.validate();
  if (st_.params.dim == 2 && st_.params.L2 + st_.params.L3 != 0.0)
    throw ConfigError(
        "2D runs fold L2,L3 into L1 (set L1 := L1 + (L2+L3)/2, L2 = L3 = 0)");
  if (st_.step_index == 0) field_copy(st_.q, st_.q_prev);
  const GridSpec& g = st_.q.grid();
  pbar_ = Field::tensor(g);
  rhs_ = Field::tensor(g);
  qnew_ = Field::tensor(g);
  rnew_ = Field::scalar(g);
  half_ = Field::tensor(g);
  hfield_ = Field::tensor(g);
  diag_ = Field::tensor(g);
  uws_ = Field::vector(g);
  energy_cached_ = energy(st_.q, st_.r, st_.params);
  e0_ = energy_cached_;
}

void Integrator::build_jacobi_diag() {
  const ModelParams& p = st_.params;
  const GridSpec& g = st_.q.grid();
  const int d = g.dim;
  const int N = g.n_interior;
  const double base = 1.0 / p.dt +
                      lap_coeff(p) * (2.0 * d) / (g.h * g.h) +
                      alpha_coeff(p) / (g.h * g.h);
  const int klo = (d == 3) ? 1 : 0, khi = (d == 3) ? N : 0;
  for (int k = klo; k <= khi; ++k)
    for (int j = 1; j <= N; ++j)
      for (int i = 1; i <= N; ++i) {
        const double* pb = pbar_.at(i, j, k);
        double v = base + 0.5 * p.M * mat_frob2(pb, d);
        double* o = diag_.at(i, j, k);
        for (int c = 0; c < d * d; ++c) o[c] = v;
      }
}

StepReport Integrator::step() {
  const ModelParams& p = st_.params;
  const GridSpec& g = st_.q.grid();
  const int d = g.dim;
  const int N = g.n_interior;

  // Pbar = P((3/2) Q^n - (1/2) Q^{n-1}); first step uses Q^{-1} = Q^0.
  field_lincomb(1.5, st_.q, -0.5, st_.q_prev, half_);
  const int klo = 0, khi = (d == 3) ? N + 1 : 0;
  for (int k = klo; k <= khi; ++k)
    for (int j = 0; j <= N + 1; ++j)
      for (int i = 0; i <= N + 1; ++i) {
        try {
          p_of(half_.at(i, j, k), d, p, pbar_.at(i, j, k));
        } catch (const QuadratizationError& e) {
          std::ostringstream os;
          os << e.what() << " at node (" << i << "," << j;
          if (d == 3) os << "," << k;
          os << "), step " << st_.step_index;
          throw QuadratizationError(os.str());
        }
      }

  build_F(st_, pbar_, rhs_, &uws_);
  if (cfg_.preconditioner == SolverConfig::Precond::jacobi)
    build_jacobi_diag();

  field_copy(st_.q, qnew_);  // warm start
  CgResult cg;
  try {
    cg = cg_solve(
        [&](const Field& in, Field& out) {
          apply_A(in, pbar_, p, out, &uws_);
        },
        rhs_, qnew_, cfg_, &diag_);
  } catch (SolverError& e) {
    std::ostringstream os;
    os << e.what() << " at step " << st_.step_index;
    throw SolverError(os.str(), e.iterations, e.residual);
  }
  qnew_.clear_boundary_and_ghosts();

  // r^{n+1} = r^n + Pbar : (Q^{n+1} - Q^n), exact nodewise.
  field_copy(st_.r, rnew_);
  for (int k = (d == 3) ? 1 : 0; k <= ((d == 3) ? N : 0); ++k)
    for (int j = 1; j <= N; ++j)
      for (int i = 1; i <= N; ++i) {
        const double* pb = pbar_.at(i, j, k);
        const double* qn = st_.q.at(i, j, k);
        const double* q1 = qnew_.at(i, j, k);
        double s = 0.0;
        for (int c = 0; c < d * d; ++c) s += pb[c] * (q1[c] - qn[c]);
        rnew_.at(i, j, k)[0] += s;
      }

  StepReport rep;
  rep.solver_iterations = cg.iterations;
  rep.solver_residual = cg.residual;
  rep.solver_warnings = cg.residual_increase_warnings;
  rep.energy_before = energy_cached_;
  rep.energy_after = energy(qnew_, rnew_, p);

  // H^{n+1/2} = L1 lap_h Q^{n+1/2} - r^{n+1/2} Pbar
  //             + ((L2+L3)/2) alpha_h Q^{n+1/2}, recomputed from the
  // solved fields so the energy audit is solver-independent.
  field_lincomb(0.5, st_.q, 0.5, qnew_, half_);
  double l1_eff = p.L1 + ((d == 2) ? 0.5 * (p.L2 + p.L3) : 0.0);
  fused_core(half_, pbar_, 0.0, l1_eff, 0.0, nullptr, 0.0, hfield_);
  if (d == 3 && p.L2 + p.L3 != 0.0)
    add_scaled_alpha(half_, 0.5 * (p.L2 + p.L3), uws_, hfield_);
  for (int k = (d == 3) ? 1 : 0; k <= ((d == 3) ? N : 0); ++k)
    for (int j = 1; j <= N; ++j)
      for (int i = 1; i <= N; ++i) {
        const double* pb = pbar_.at(i, j, k);
        double rh = 0.5 * (st_.r.at(i, j, k)[0] + rnew_.at(i, j, k)[0]);
        double* hp = hfield_.at(i, j, k);
        for (int c = 0; c < d * d; ++c) hp[c] -= rh * pb[c];
      }
  double h_norm_sq = norm_h_sq(hfield_);
  rep.dissipation_residual =
      (rep.energy_after - rep.energy_before) + p.dt * p.M * h_norm_sq;

  StructureDrift drift = structure_drift(qnew_);
  rep.trace_drift = drift.trace;
  rep.sym_drift = drift.asym;
  if (drift.trace > integrity_tol_ || drift.asym > integrity_tol_) {
    std::ostringstream os;
    os << "structure drift exceeded tolerance " << integrity_tol_
       << " at step " << st_.step_index << " (trace " << drift.trace
       << ", asym " << drift.asym << ")";
    throw IntegrityError(os.str());
  }

  field_lincomb(1.0 / p.dt, qnew_, -1.0 / p.dt, st_.q, half_);
  rep.dt_q_norm_sq = norm_h_sq(half_);

  std::swap(st_.q_prev, st_.q);
  std::swap(st_.q, qnew_);
  std::swap(st_.r, rnew_);
  ++st_.step_index;
  energy_cached_ = rep.energy_after;

  Diagnostics diag = diagnostics(st_);
  rep.min_r = diag.min_r;
  rep.max_q_frob = diag.max_q_frob;
  return rep;
}

}  // namespace qgf
