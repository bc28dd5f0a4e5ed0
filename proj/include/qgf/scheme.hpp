// scheme.hpp
// One time step of the fully discrete quadratized gradient flow:
//
//   A(Q^{n+1}) = F(Q^n)        (matrix-free CG solve)
//   r^{n+1}    = r^n + Pbar : (Q^{n+1} - Q^n)   (evaluated exactly)
//
// with
//   A(X) = X/dt - (M L1/2) lap_h X + (M/2)(Pbar:X) Pbar
//          - (M (L2+L3)/4) alpha_h X
//   F(Q) = Q/dt + (M L1/2) lap_h Q + (M/2)(Pbar:Q) Pbar - M r Pbar
//          + (M (L2+L3)/4) alpha_h Q
//
// and Pbar = P((3/2) Q^n - (1/2) Q^{n-1}). Every step reports the energy
// dissipation residual (E^{n+1} - E^n) + dt M ||H^{n+1/2}||_h^2, which is
// zero for an exact solve.

#pragma once

#include "qgf/field.hpp"
#include "qgf/linsolve.hpp"
#include "qgf/potential.hpp"

namespace qgf {

struct SchemeState {
  int step_index = 0;
  Field q;       // Q^n (tensor)
  Field q_prev;  // Q^{n-1}
  Field r;       // r^n (scalar)
  ModelParams params;

  double time() const { return step_index * params.dt; }
};

SchemeState make_state(Field q0, Field r0, const ModelParams& p);

struct StepReport {
  double energy_before = 0.0;
  double energy_after = 0.0;
  double dissipation_residual = 0.0;  // (E^{n+1}-E^n) + dt M ||H||_h^2
  double trace_drift = 0.0;           // max |tr Q^{n+1}| over interior
  double sym_drift = 0.0;             // max |Q - Q^T| entry over interior
  int solver_iterations = 0;
  double solver_residual = 0.0;
  int solver_warnings = 0;
  double min_r = 0.0;
  double max_q_frob = 0.0;
  double dt_q_norm_sq = 0.0;  // ||(Q^{n+1}-Q^n)/dt||_h^2
};

// out = A(x); `u_ws` is scratch for the 3D alpha pass (may be null, then
// a temporary is allocated).
void apply_A(const Field& x, const Field& pbar, const ModelParams& p,
             Field& out, Field* u_ws = nullptr);
Field apply_A(const Field& x, const Field& pbar, const ModelParams& p);

void build_F(const SchemeState& st, const Field& pbar, Field& out,
             Field* u_ws = nullptr);

// E = (L1/2)||grad_h Q||^2 + ((L2+L3)/2)||div_h Q||^2 + (1/2)||r||^2
double energy(const Field& q, const Field& r, const ModelParams& p);

struct Diagnostics {
  double trace_drift = 0.0;
  double sym_drift = 0.0;
  double min_r = 0.0;
  double max_q_frob = 0.0;
};
Diagnostics diagnostics(const SchemeState& st);

class Integrator {
 public:
  // Trace/symmetry drift beyond `integrity_tol` aborts the run.
  Integrator(SchemeState st, SolverConfig cfg, double integrity_tol = 1e-11);

  StepReport step();

  const SchemeState& state() const { return st_; }
  SchemeState& state() { return st_; }
  double initial_energy() const { return e0_; }

 private:
  void build_jacobi_diag();

  SchemeState st_;
  SolverConfig cfg_;
  double integrity_tol_;
  double e0_ = 0.0;
  double energy_cached_ = 0.0;
  Field pbar_, rhs_, qnew_, rnew_, half_, hfield_, diag_, uws_;
};

}  // namespace qgf
