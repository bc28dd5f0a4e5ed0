#include "qgf/verify.hpp"

#include <cmath>
#include <sstream>

#include "qgf/experiments.hpp"
#include "qgf/initial.hpp"
#include "qgf/operators.hpp"
#include "qgf/random_fields.hpp"
#include "qgf/scheme.hpp"
#include "qgf/tensor.hpp"

namespace qgf {

namespace {

double rel_err(double lhs, double rhs) {
  double scale = std::fmax(std::fmax(std::fabs(lhs), std::fabs(rhs)), 1e-30);
  return std::fabs(lhs - rhs) / scale;
}

PropertyResult make_result(const std::string& name, double worst, double tol,
                           const std::string& detail = "") {
  PropertyResult r;
  r.name = name;
  r.worst = worst;
  r.pass = worst <= tol;
  std::ostringstream os;
  os << "worst=" << worst << " tol=" << tol;
  if (!detail.empty()) os << " " << detail;
  r.detail = os.str();
  return r;
}

GridSpec grid_for(int dim) {
  return GridSpec::cube(dim, dim == 2 ? 17 : 9, 1.0);
}

// Raw sums over real nodes of A : D B, via the h^d-weighted inner
// product (the weight cancels between the two sides).
double sbp_pair(const Field& a, const Field& b, int axis, DiffKind on_b,
                DiffKind on_a) {
  Field db = diff(b, axis, on_b);
  Field da = diff(a, axis, on_a);
  return rel_err(inner_h(a, db), -inner_h(b, da));
}

PropertyResult check_sbp_forward_backward(const VerifyOptions& opts) {
  double worst = 0.0;
  for (int dim : {2, 3}) {
    Rng rng(opts.seed + dim);
    GridSpec g = grid_for(dim);
    for (int t = 0; t < opts.sbp_trials; ++t) {
      Field a = random_scalar_dirichlet(g, rng);
      Field b = random_scalar_everywhere(g, rng);
      for (int axis = 1; axis <= dim; ++axis) {
        worst = std::fmax(
            worst, sbp_pair(a, b, axis, DiffKind::forward, DiffKind::backward));
        worst = std::fmax(
            worst, sbp_pair(a, b, axis, DiffKind::backward, DiffKind::forward));
      }
    }
  }
  return make_result("sbp-forward-backward", worst, 1e-12);
}

PropertyResult check_sbp_central(const VerifyOptions& opts) {
  double worst = 0.0;
  for (int dim : {2, 3}) {
    Rng rng(opts.seed + 10 + dim);
    GridSpec g = grid_for(dim);
    for (int t = 0; t < opts.sbp_trials; ++t) {
      Field a = random_scalar_dirichlet(g, rng);
      Field b = random_scalar_everywhere(g, rng);
      for (int axis = 1; axis <= dim; ++axis)
        worst = std::fmax(
            worst, sbp_pair(a, b, axis, DiffKind::central, DiffKind::central));
    }
  }
  return make_result("sbp-central", worst, 1e-12);
}

double grad_inner(const Field& a, const Field& b) {
  double s = 0.0;
  for (int axis = 1; axis <= a.grid().dim; ++axis)
    s += inner_h(diff(a, axis, DiffKind::backward),
                 diff(b, axis, DiffKind::backward));
  return s;
}

PropertyResult check_laplace_adjoint(const VerifyOptions& opts) {
  double worst = 0.0;
  for (int dim : {2, 3}) {
    Rng rng(opts.seed + 20 + dim);
    GridSpec g = grid_for(dim);
    for (int t = 0; t < opts.sbp_trials; ++t) {
      Field a = random_tensor_dirichlet(g, rng);
      Field b = random_tensor_dirichlet(g, rng);
      worst = std::fmax(worst, rel_err(inner_h(a, laplacian_h(b)),
                                       -grad_inner(a, b)));
    }
  }
  return make_result("laplacian-adjointness", worst, 1e-12);
}

PropertyResult check_alpha_adjoint(const VerifyOptions& opts) {
  double worst = 0.0;
  for (int dim : {2, 3}) {
    Rng rng(opts.seed + 30 + dim);
    GridSpec g = grid_for(dim);
    for (int t = 0; t < opts.sbp_trials; ++t) {
      Field a = random_stf_dirichlet(g, rng);
      Field b = random_stf_dirichlet(g, rng);
      Field ab = alpha_h_central(b);
      if (opts.inject_alpha_sign_error) field_scale(ab, -1.0);
      double lhs = inner_h(a, ab);
      double rhs = -2.0 * inner_h(div_h(a), div_h(b));
      worst = std::fmax(worst, rel_err(lhs, rhs));
    }
  }
  return make_result("alpha-adjointness", worst, 1e-12);
}

PropertyResult check_alpha_structure(const VerifyOptions& opts) {
  double worst_trace = 0.0, worst_asym = 0.0;
  for (int dim : {2, 3}) {
    Rng rng(opts.seed + 40 + dim);
    GridSpec g = grid_for(dim);
    const int N = g.n_interior;
    for (int t = 0; t < 8; ++t) {
      Field x = random_tensor_dirichlet(g, rng);
      Field ax = alpha_h_central(x);
      const int klo = (dim == 3) ? 1 : 0, khi = (dim == 3) ? N : 0;
      for (int k = klo; k <= khi; ++k)
        for (int j = 1; j <= N; ++j)
          for (int i = 1; i <= N; ++i)
            worst_trace =
                std::fmax(worst_trace, std::fabs(mat_trace(ax.at(i, j, k), dim)));
      Field s = random_stf_dirichlet(g, rng);
      StructureDrift d = structure_drift(alpha_h_central(s));
      worst_asym = std::fmax(worst_asym, d.asym);
    }
  }
  std::ostringstream extra;
  extra << "asym=" << worst_asym;
  PropertyResult r =
      make_result("alpha-structure", std::fmax(worst_trace, worst_asym), 1e-13,
                  extra.str());
  return r;
}

PropertyResult check_linearity(const VerifyOptions& opts) {
  double worst = 0.0;
  for (int dim : {2, 3}) {
    Rng rng(opts.seed + 50 + dim);
    GridSpec g = grid_for(dim);
    const double lam = 0.37;
    for (int t = 0; t < 6; ++t) {
      Field a = random_tensor_dirichlet(g, rng);
      Field b = random_tensor_dirichlet(g, rng);
      Field combo(g, a.comps());
      field_lincomb(1.0, a, lam, b, combo);
      auto check = [&](auto&& op) {
        Field lhs = op(combo);
        Field ra = op(a);
        Field rb = op(b);
        Field rhs(g, lhs.comps());
        field_lincomb(1.0, ra, lam, rb, rhs);
        Field d(g, lhs.comps());
        field_lincomb(1.0, lhs, -1.0, rhs, d);
        double scale = std::fmax(norm_h(lhs), 1e-30);
        worst = std::fmax(worst, norm_h(d) / scale);
      };
      check([](const Field& f) { return laplacian_h(f); });
      check([](const Field& f) { return alpha_h_central(f); });
      check([](const Field& f) { return div_h(f); });
      check([](const Field& f) { return diff(f, 1, DiffKind::central); });
    }
  }
  return make_result("operator-linearity", worst, 1e-13);
}

ModelParams params3d() {
  ModelParams p;
  p.dim = 3;
  p.L1 = 1e-3;
  p.L2 = 2e-3;
  p.L3 = 1e-3;
  p.dt = 1e-3;
  return p;
}

PropertyResult check_spd_dense(const VerifyOptions& opts) {
  double worst_asym = 0.0, min_eig = 1e300;
  for (int dim : {2, 3}) {
    Rng rng(opts.seed + 60 + dim);
    GridSpec g = GridSpec::cube(dim, dim == 2 ? 5 : 4, 1.0);
    ModelParams p = (dim == 2) ? ModelParams{} : params3d();
    p.dim = dim;
    p.dt = 1.0;  // keeps matrix entries O(1) so 1e-13 is meaningful
    for (int t = 0; t < 5; ++t) {
      Field pbar = random_stf_dirichlet(g, rng, 0.3);
      auto apply = [&](const Field& in, Field& out) {
        apply_A(in, pbar, p, out);
      };
      DenseSystem sys = dense_assemble(apply, g);
      worst_asym = std::fmax(worst_asym, dense_max_asymmetry(sys));
      min_eig = std::fmin(min_eig, dense_smallest_eigenvalue(sys));
    }
  }
  std::ostringstream extra;
  extra << "min_eig=" << min_eig;
  PropertyResult r = make_result("operator-spd-dense", worst_asym, 1e-13,
                                 extra.str());
  r.pass = r.pass && min_eig > 0.0;
  return r;
}

PropertyResult check_apply_self_adjoint(const VerifyOptions& opts) {
  double worst = 0.0;
  for (int dim : {2, 3}) {
    Rng rng(opts.seed + 70 + dim);
    GridSpec g = grid_for(dim);
    ModelParams p = (dim == 2) ? ModelParams{} : params3d();
    p.dim = dim;
    for (int t = 0; t < 10; ++t) {
      Field pbar = random_stf_dirichlet(g, rng, 0.3);
      Field x = random_stf_dirichlet(g, rng);
      Field y = random_stf_dirichlet(g, rng);
      worst = std::fmax(worst, rel_err(inner_h(apply_A(x, pbar, p), y),
                                       inner_h(apply_A(y, pbar, p), x)));
    }
  }
  return make_result("apply-A-self-adjoint", worst, 1e-12);
}

void q0_3d(double x, double y, double z, double* out) {
  constexpr double pi = 3.14159265358979323846;
  double bump = std::sin(pi * x) * std::sin(pi * y) * std::sin(pi * z);
  double s = 0.4 * bump * bump;
  double m2 = 0.3 * std::sin(pi * x) * std::sin(2.0 * pi * y) *
              std::sin(pi * z);
  // diag(s, s, -2s)/sqrt(6)-style trace-free part plus a symmetric
  // off-diagonal mode.
  out[0] = s;
  out[4] = s;
  out[8] = -2.0 * s;
  out[1] = out[3] = m2;
  out[2] = out[6] = 0.5 * m2;
  out[5] = out[7] = -0.25 * m2;
}

PropertyResult check_energy_identity(const VerifyOptions& opts) {
  double worst = 0.0;
  std::ostringstream detail;
  {
    // 2D: defect example configuration shrunk.
    ExperimentSpec s = experiment_preset(InitialCondition::example2_defect);
    s.cells = 16;
    s.steps = 20;
    s.T = 20 * 1e-3;
    s.snapshot_times.clear();
    SolverConfig cfg;
    cfg.rel_tolerance = 1e-12;
    RunOutput out = run_experiment(s, cfg);
    worst = std::fmax(worst, out.max_abs_dissipation_residual / out.e0);
    detail << "2d=" << out.max_abs_dissipation_residual / out.e0;
  }
  {
    // 3D with active divergence elasticity.
    GridSpec g = GridSpec::cube(3, 9, 1.0);
    ModelParams p = params3d();
    InitialData init = project_initial(g, p, q0_3d);
    SolverConfig cfg;
    cfg.rel_tolerance = 1e-12;
    Integrator integ(make_state(std::move(init.q), std::move(init.r), p), cfg);
    double w3 = 0.0;
    for (int n = 0; n < 10; ++n) {
      StepReport rep = integ.step();
      w3 = std::fmax(w3,
                     std::fabs(rep.dissipation_residual) / integ.initial_energy());
    }
    worst = std::fmax(worst, w3);
    detail << " 3d=" << w3;
  }
  (void)opts;
  return make_result("energy-identity", worst, 1e-9, detail.str());
}

PropertyResult check_r_update_exact(const VerifyOptions& opts) {
  (void)opts;
  ExperimentSpec s = experiment_preset(InitialCondition::example1);
  s.cells = 12;
  s.steps = 3;
  s.T = 3e-3;
  s.snapshot_times.clear();
  GridSpec g = s.grid();
  ModelParams p = s.resolved_params();
  InitialData init = project_initial(g, p, initial_condition_fn(s.ic));
  SolverConfig cfg;
  Integrator integ(make_state(std::move(init.q), std::move(init.r), p), cfg);
  double worst = 0.0;
  for (int n = 0; n < s.steps; ++n) {
    Field q_before = integ.state().q;
    Field q_prev_before = integ.state().q_prev;
    Field r_before = integ.state().r;
    integ.step();
    Field pb = p_bar(q_before, q_prev_before, p);
    const int N = g.n_interior;
    for (int j = 1; j <= N; ++j)
      for (int i = 1; i <= N; ++i) {
        const double* pbn = pb.at(i, j);
        const double* q1 = integ.state().q.at(i, j);
        const double* q0 = q_before.at(i, j);
        double s2 = 0.0;
        for (int c = 0; c < 4; ++c) s2 += pbn[c] * (q1[c] - q0[c]);
        double expect = r_before.at(i, j)[0] + s2;
        worst = std::fmax(worst,
                          std::fabs(integ.state().r.at(i, j)[0] - expect));
      }
  }
  return make_result("r-update-exact", worst, 1e-13);
}

PropertyResult check_structure_preservation(const VerifyOptions& opts) {
  (void)opts;
  ExperimentSpec s = experiment_preset(InitialCondition::example1);
  s.cells = 24;
  s.steps = 50;
  s.T = 50 * 1e-3;
  s.snapshot_times.clear();
  SolverConfig cfg;
  RunOutput out = run_experiment(s, cfg);
  double worst = 0.0;
  for (const EnergyRow& r : out.trace)
    worst = std::fmax(worst, std::fmax(r.trace_drift, r.sym_drift));
  return make_result("structure-preservation", worst, 1e-11);
}

PropertyResult check_potential_structure(const VerifyOptions& opts) {
  Rng rng(opts.seed + 80);
  double worst = 0.0;
  std::uniform_real_distribution<double> unorm(0.0, 3.0);
  for (int dim : {2, 3}) {
    ModelParams p;
    p.dim = dim;
    for (int t = 0; t < 2000; ++t) {
      double q[9], s[9], pq[9];
      random_stf_matrix(dim, rng, unorm(rng), q);
      s_of(q, dim, p, s);
      p_of(q, dim, p, pq);
      double scale = std::fmax(1.0, mat_frob(s, dim));
      worst = std::fmax(worst, std::fabs(mat_trace(s, dim)) / scale);
      worst = std::fmax(worst, mat_asym_max(s, dim) / scale);
      worst = std::fmax(worst, std::fabs(mat_trace(pq, dim)));
      worst = std::fmax(worst, mat_asym_max(pq, dim));
      // r^2 - 2 A0 = 2 F_B, relative to the radicand scale (F_B itself
      // passes through zero on the sampling range).
      double r = r_of(q, dim, p);
      worst = std::fmax(worst,
                        std::fabs((r * r - 2.0 * p.A0) -
                                  2.0 * bulk_energy(q, dim, p)) /
                            (r * r));
    }
  }
  return make_result("potential-structure", worst, 1e-12);
}

PropertyResult check_variational_p(const VerifyOptions& opts) {
  Rng rng(opts.seed + 90);
  double worst = 0.0;
  for (int dim : {2, 3}) {
    ModelParams p;
    p.dim = dim;
    for (int t = 0; t < 200; ++t) {
      double q[9], e[9], pq[9], qp[9], qm[9];
      random_stf_matrix(dim, rng, 1.5, q);
      random_stf_matrix(dim, rng, 1.0, e);
      p_of(q, dim, p, pq);
      const double eps = 1e-6;
      for (int c = 0; c < dim * dim; ++c) {
        qp[c] = q[c] + eps * e[c];
        qm[c] = q[c] - eps * e[c];
      }
      double fd = (r_of(qp, dim, p) - r_of(qm, dim, p)) / (2.0 * eps);
      double scale = 1.0 + mat_frob(pq, dim) * mat_frob(e, dim);
      worst =
          std::fmax(worst, std::fabs(fd - mat_dot(pq, e, dim)) / scale);
    }
  }
  return make_result("p-variational-derivative", worst, 1e-6);
}

PropertyResult check_r_growth_bounds(const VerifyOptions& opts) {
  Rng rng(opts.seed + 100);
  std::uniform_real_distribution<double> unorm(10.0, 50.0);
  bool ok = true;
  double worst = 0.0;
  for (int dim : {2, 3}) {
    ModelParams p;
    p.dim = dim;
    for (int t = 0; t < 5000; ++t) {
      double q[9];
      random_stf_matrix(dim, rng, unorm(rng), q);
      double f2 = mat_frob2(q, dim);
      double r = r_of(q, dim, p);
      double lo = 0.5 * std::sqrt(p.c) * f2;
      double hi = std::sqrt(p.c) * f2;
      if (!(r >= lo && r <= hi)) {
        ok = false;
        worst = std::fmax(worst, std::fmax(lo - r, r - hi));
      }
    }
  }
  PropertyResult res = make_result("r-large-q-bounds", worst, 0.0);
  res.pass = ok;
  return res;
}

PropertyResult check_lipschitz_sample(const VerifyOptions& opts) {
  Rng rng(opts.seed + 110);
  std::uniform_real_distribution<double> uq(0.0, 20.0), ud(1e-6, 10.0);
  double worst = 0.0;
  for (int dim : {2, 3}) {
    ModelParams p;
    p.dim = dim;
    for (int t = 0; t < 20000; ++t) {
      double q[9], dq[9], q2[9], p1[9], p2[9];
      random_stf_matrix(dim, rng, uq(rng), q);
      double dn = ud(rng);
      random_stf_matrix(dim, rng, dn, dq);
      for (int c = 0; c < dim * dim; ++c) q2[c] = q[c] + dq[c];
      p_of(q, dim, p, p1);
      p_of(q2, dim, p, p2);
      double num = 0.0;
      for (int c = 0; c < dim * dim; ++c) {
        double d = p2[c] - p1[c];
        num += d * d;
      }
      worst = std::fmax(worst, std::sqrt(num) / dn);
    }
  }
  std::ostringstream extra;
  extra << "max-ratio=" << worst;
  PropertyResult res = make_result("p-lipschitz-sample", worst, 10.0,
                                   extra.str());
  return res;
}

PropertyResult check_cg(const VerifyOptions& opts) {
  Rng rng(opts.seed + 120);
  GridSpec g = GridSpec::cube(2, 17, 1.0);
  ModelParams p;
  double worst = 0.0;
  std::ostringstream detail;
  Field pbar = random_stf_dirichlet(g, rng, 0.3);
  auto apply = [&](const Field& in, Field& out) {
    apply_A(in, pbar, p, out);
  };
  // Manufactured solution.
  Field y = random_stf_dirichlet(g, rng);
  Field rhs = apply_A(y, pbar, p);
  Field x = Field::tensor(g);
  SolverConfig cfg;
  cfg.rel_tolerance = 1e-10;
  cg_solve(apply, rhs, x, cfg);
  Field d = Field::tensor(g);
  field_lincomb(1.0, x, -1.0, y, d);
  worst = norm_h(d) / norm_h(y);
  detail << "manufactured=" << worst;
  // Initial-guess independence.
  Field x2 = random_stf_dirichlet(g, rng);
  cg_solve(apply, rhs, x2, cfg);
  field_lincomb(1.0, x, -1.0, x2, d);
  double guess_diff = norm_h(d) / norm_h(rhs);
  detail << " guess-diff=" << guess_diff;
  bool ok = worst <= 1e-8 && guess_diff <= 10.0 * cfg.rel_tolerance;
  PropertyResult res =
      make_result("cg-solver", std::fmax(worst, guess_diff), 1.0, detail.str());
  res.pass = ok;
  return res;
}

PropertyResult check_projection_oracle(const VerifyOptions& opts) {
  (void)opts;
  GridSpec g = GridSpec::cube(2, 10, 2.0);
  ModelParams p;
  MatrixFn f = initial_condition_fn(InitialCondition::example1);
  InitialData gauss = project_initial(g, p, f, 3);
  InitialData dense = project_initial(g, p, f, 10);  // 100 points per cell
  double worst = 0.0;
  const int N = g.n_interior;
  for (int j = 1; j <= N; ++j)
    for (int i = 1; i <= N; ++i) {
      for (int c = 0; c < 4; ++c)
        worst = std::fmax(worst, std::fabs(gauss.q.at(i, j)[c] -
                                           dense.q.at(i, j)[c]));
      worst = std::fmax(worst,
                        std::fabs(gauss.r.at(i, j)[0] - dense.r.at(i, j)[0]));
    }
  return make_result("cell-average-quadrature", worst, 1e-10);
}

PropertyResult check_run_monitors(const VerifyOptions& opts) {
  (void)opts;
  ExperimentSpec s = experiment_preset(InitialCondition::example1);
  s.cells = 20;
  s.steps = 40;
  s.T = 0.04;
  s.snapshot_times.clear();
  SolverConfig cfg;
  RunOutput out = run_experiment(s, cfg);
  bool mono = true;
  for (size_t k = 1; k < out.trace.size(); ++k)
    if (out.trace[k].energy > out.trace[k - 1].energy + 1e-10 * out.e0)
      mono = false;
  PropertyResult res;
  res.name = "stability-monitors";
  res.pass = out.timederiv_bound_ok && out.growth_bound_ok && mono;
  res.worst = out.dtq_sum / (s.params.M * out.e0);
  std::ostringstream os;
  os << "dtq/(M*E0)=" << res.worst << " monotone=" << mono;
  res.detail = os.str();
  return res;
}

PropertyResult check_stationarity(const VerifyOptions& opts) {
  (void)opts;
  GridSpec g = GridSpec::cube(2, 12, 1.0);
  ModelParams p;
  Field q0 = Field::tensor(g);
  Field r0 = Field::scalar(g);
  const double rconst = std::sqrt(2.0 * p.A0);
  const int N = g.n_interior;
  for (int j = 0; j <= N + 1; ++j)
    for (int i = 0; i <= N + 1; ++i) r0.at(i, j)[0] = rconst;
  SolverConfig cfg;
  Integrator integ(make_state(std::move(q0), std::move(r0), p), cfg);
  bool exact = true;
  for (int n = 0; n < 10; ++n) {
    integ.step();
    for (double v : integ.state().q.data())
      if (v != 0.0) exact = false;
    for (int j = 0; j <= N + 1; ++j)
      for (int i = 0; i <= N + 1; ++i)
        if (integ.state().r.at(i, j)[0] != rconst) exact = false;
  }
  PropertyResult res;
  res.name = "zero-field-stationarity";
  res.pass = exact;
  res.worst = exact ? 0.0 : 1.0;
  res.detail = exact ? "bitwise stationary" : "drifted";
  return res;
}

PropertyResult check_cauchy_schwarz(const VerifyOptions& opts) {
  Rng rng(opts.seed + 130);
  double worst = 0.0;
  for (int dim : {2, 3}) {
    GridSpec g = grid_for(dim);
    for (int t = 0; t < 20; ++t) {
      Field a = random_tensor_dirichlet(g, rng);
      Field b = random_tensor_dirichlet(g, rng);
      double lhs = std::fabs(inner_h(a, b));
      double rhs = norm_h(a) * norm_h(b);
      if (lhs > rhs) worst = std::fmax(worst, (lhs - rhs) / rhs);
    }
  }
  return make_result("cauchy-schwarz", worst, 1e-14);
}

}  // namespace

std::vector<PropertyResult> run_verify_battery(const VerifyOptions& opts) {
  std::vector<PropertyResult> out;
  out.push_back(check_sbp_forward_backward(opts));
  out.push_back(check_sbp_central(opts));
  out.push_back(check_laplace_adjoint(opts));
  out.push_back(check_alpha_adjoint(opts));
  out.push_back(check_alpha_structure(opts));
  out.push_back(check_linearity(opts));
  out.push_back(check_spd_dense(opts));
  out.push_back(check_apply_self_adjoint(opts));
  out.push_back(check_energy_identity(opts));
  out.push_back(check_r_update_exact(opts));
  out.push_back(check_structure_preservation(opts));
  out.push_back(check_potential_structure(opts));
  out.push_back(check_variational_p(opts));
  out.push_back(check_r_growth_bounds(opts));
  out.push_back(check_lipschitz_sample(opts));
  out.push_back(check_cg(opts));
  out.push_back(check_projection_oracle(opts));
  out.push_back(check_run_monitors(opts));
  out.push_back(check_stationarity(opts));
  out.push_back(check_cauchy_schwarz(opts));
  return out;
}

}  // namespace qgf
