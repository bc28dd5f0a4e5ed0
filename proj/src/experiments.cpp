#include "qgf/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "qgf/operators.hpp"
#include "qgf/tensor.hpp"

namespace qgf {

InitialCondition initial_condition_from_key(const std::string& key) {
  if (key == "example1") return InitialCondition::example1;
  if (key == "example2_defect") return InitialCondition::example2_defect;
  if (key == "example3_hole") return InitialCondition::example3_hole;
  if (key == "zero") return InitialCondition::zero;
  throw ArgumentError("unknown initial condition key: " + key);
}

std::string initial_condition_key(InitialCondition ic) {
  switch (ic) {
    case InitialCondition::example1: return "example1";
    case InitialCondition::example2_defect: return "example2_defect";
    case InitialCondition::example3_hole: return "example3_hole";
    case InitialCondition::zero: return "zero";
  }
  return "?";
}

namespace {

constexpr double kPi = 3.14159265358979323846;

void director_to_q(double nx, double ny, double* out) {
  double half_norm2 = 0.5 * (nx * nx + ny * ny);
  out[0] = nx * nx - half_norm2;
  out[1] = nx * ny;
  out[2] = nx * ny;
  out[3] = ny * ny - half_norm2;
}

}  // namespace

void initial_condition(InitialCondition ic, double x, double y, double* out) {
  double nx = 0.0, ny = 0.0;
  switch (ic) {
    case InitialCondition::example1:
      nx = x * (2.0 - x) * y * (2.0 - y);
      ny = std::sin(kPi * x) * std::sin(0.5 * kPi * y);
      break;
    case InitialCondition::example2_defect:
      nx = std::log(x * x + 1.0) * (x - 2.0) * (x - 2.0) *
           std::sin(0.5 * kPi * y) * (std::exp(1.5) - std::exp(x));
      ny = (y - 2.0) * (y - 3.0) * std::sin(kPi * y / 10.0) *
           std::sin(0.5 * kPi * x) * (0.7 - y);
      break;
    case InitialCondition::example3_hole: {
      double tx = x * (1.0 - x) * y * (1.0 - y);
      double ty = std::sin(2.0 * kPi * x) * std::sin(2.0 * kPi * y);
      double norm = std::sqrt(tx * tx + ty * ty);
      double denom = std::max(norm, 1e-12);
      nx = tx / denom;
      ny = ty / denom;
      break;
    }
    case InitialCondition::zero:
      break;
  }
  director_to_q(nx, ny, out);
}

MatrixFn initial_condition_fn(InitialCondition ic) {
  return [ic](double x, double y, double, double* out) {
    initial_condition(ic, x, y, out);
  };
}

void ExperimentSpec::validate() const {
  if (dim != 2) throw ConfigError("experiment catalog is 2D only");
  if (cells < 2) throw ConfigError("experiment: grid too small");
  if (steps < 1) throw ConfigError("experiment: need at least one step");
  if (!(T > 0.0)) throw ConfigError("experiment: T must be positive");
  resolved_params().validate();
  for (double t : snapshot_times)
    if (t < -1e-12 || t > T * (1.0 + 1e-12))
      throw ConfigError("experiment: snapshot time outside [0, T]");
}

ExperimentSpec experiment_preset(InitialCondition ic) {
  ExperimentSpec s;
  s.ic = ic;
  s.name = initial_condition_key(ic);
  s.params = ModelParams{};  // a=-0.3, b=-4, c=4, A0=500, M=1
  switch (ic) {
    case InitialCondition::example1:
      s.side = 2.0;
      s.cells = 80;
      s.steps = 400;
      s.T = 0.4;
      s.params.L1 = 1e-3;
      break;
    case InitialCondition::example2_defect:
      s.side = 2.0;
      s.cells = 40;
      s.steps = 4000;
      s.T = 4.0;
      s.params.L1 = 1e-3;
      for (int i = 0; i <= 8; ++i) s.snapshot_times.push_back(0.5 * i);
      break;
    case InitialCondition::example3_hole:
      s.side = 1.0;
      s.cells = 50;
      s.steps = 100;
      s.T = 10.0;
      s.params.a = -0.2;
      s.params.b = 1.0;
      s.params.c = 1.0;
      s.params.L1 = 2.5e-3;
      for (int i = 0; i <= 5; ++i) s.snapshot_times.push_back(0.2 * i);
      break;
    case InitialCondition::zero:
      s.side = 1.0;
      s.cells = 16;
      s.steps = 100;
      s.T = 0.1;
      s.params.L1 = 1e-3;
      break;
  }
  return s;
}

RunOutput run_experiment(const ExperimentSpec& spec, const SolverConfig& cfg,
                         SnapshotSink* sink) {
  spec.validate();
  const GridSpec g = spec.grid();
  const ModelParams p = spec.resolved_params();
  InitialData init = project_initial(g, p, initial_condition_fn(spec.ic));
  Integrator integ(make_state(std::move(init.q), std::move(init.r), p), cfg);

  // Snapshot times snapped to the nearest step index.
  std::vector<int> snap_steps;
  for (double t : spec.snapshot_times)
    snap_steps.push_back(static_cast<int>(std::llround(t / p.dt)));
  auto wants_snapshot = [&](int step) {
    return std::find(snap_steps.begin(), snap_steps.end(), step) !=
           snap_steps.end();
  };

  RunOutput out;
  out.e0 = integ.initial_energy();
  out.trace.push_back(EnergyRow{0, 0.0, out.e0, 0.0, 0.0, 0.0, 0, 0.0});
  if (sink && wants_snapshot(0)) sink->on_snapshot(0, 0.0, integ.state());

  const double q0_norm = norm_h(integ.state().q);
  for (int n = 0; n < spec.steps; ++n) {
    StepReport rep = integ.step();
    const int step = integ.state().step_index;
    out.trace.push_back(EnergyRow{step, step * p.dt, rep.energy_after,
                                  rep.dissipation_residual, rep.trace_drift,
                                  rep.sym_drift, rep.solver_iterations,
                                  rep.solver_residual});
    out.max_abs_dissipation_residual =
        std::fmax(out.max_abs_dissipation_residual,
                  std::fabs(rep.dissipation_residual));
    out.dtq_sum += p.dt * rep.dt_q_norm_sq;
    if (out.dtq_sum > p.M * out.e0 * (1.0 + 1e-9) + 1e-12)
      out.timederiv_bound_ok = false;
    double qm = norm_h(integ.state().q);
    double bound = std::sqrt(spec.T) * std::sqrt(out.dtq_sum) + q0_norm;
    if (qm > bound * (1.0 + 1e-9) + 1e-12) out.growth_bound_ok = false;
    if (sink && wants_snapshot(step))
      sink->on_snapshot(step, step * p.dt, integ.state());
  }
  out.state = integ.state();
  return out;
}

double largest_eigenvalue_2x2(const double* q) {
  return std::sqrt(q[0] * q[0] + q[1] * q[1]);
}

Director director_2x2(const double* q) {
  Director dir;
  double lam = largest_eigenvalue_2x2(q);
  if (lam == 0.0) {
    dir.isotropic = true;
    return dir;
  }
  // (Q - lam I) v = 0; pick the more stable row.
  double vx = q[1], vy = lam - q[0];
  double alt_x = lam + q[0], alt_y = q[1];
  if (alt_x * alt_x + alt_y * alt_y > vx * vx + vy * vy) {
    vx = alt_x;
    vy = alt_y;
  }
  double norm = std::sqrt(vx * vx + vy * vy);
  vx /= norm;
  vy /= norm;
  // Sign convention: first nonzero component positive.
  if (vx < 0.0 || (vx == 0.0 && vy < 0.0)) {
    vx = -vx;
    vy = -vy;
  }
  dir.nx = vx;
  dir.ny = vy;
  return dir;
}

Field lambda_max_field(const Field& q) {
  const GridSpec& g = q.grid();
  if (g.dim != 2 || q.comps() != 4)
    throw ArgumentError("lambda_max_field: 2D tensor field expected");
  Field out = Field::scalar(g);
  const int N = g.n_interior;
  for (int j = 0; j <= N + 1; ++j)
    for (int i = 0; i <= N + 1; ++i)
      out.at(i, j)[0] = largest_eigenvalue_2x2(q.at(i, j));
  return out;
}

double l2_error_component(const Field& coarse, const Field& reference,
                          int comp) {
  const GridSpec& gc = coarse.grid();
  const GridSpec& gf = reference.grid();
  if (gc.dim != gf.dim || coarse.comps() != reference.comps())
    throw ArgumentError("l2_error: incompatible fields");
  if (gc.origin != gf.origin || gc.side != gf.side)
    throw ArgumentError("l2_error: domains differ");
  if (comp < 0 || comp >= coarse.comps())
    throw ArgumentError("l2_error: bad component");
  if (gf.cells() % gc.cells() != 0)
    throw ArgumentError("l2_error: grids are not nested");
  const int ratio = gf.cells() / gc.cells();
  const int N = gc.n_interior;
  const int klo = 0, khi = (gc.dim == 3) ? N + 1 : 0;
  double acc = 0.0;
  for (int k = klo; k <= khi; ++k)
    for (int j = 0; j <= N + 1; ++j)
      for (int i = 0; i <= N + 1; ++i) {
        double diff = coarse.at(i, j, k)[comp] -
                      reference.at(i * ratio, j * ratio, k * ratio)[comp];
        acc += diff * diff;
      }
  return std::sqrt(std::pow(gc.h, gc.dim) * acc);
}

TrackedErrors l2_errors(const SchemeState& coarse,
                        const SchemeState& reference) {
  TrackedErrors e;
  e.q11 = l2_error_component(coarse.q, reference.q, 0);
  e.q12 = l2_error_component(coarse.q, reference.q, 1);
  e.r = l2_error_component(coarse.r, reference.r, 0);
  return e;
}

std::vector<double> convergence_orders(const std::vector<double>& errors) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> orders(errors.size(), nan);
  for (size_t k = 1; k < errors.size(); ++k) {
    if (errors[k - 1] > 0.0 && errors[k] > 0.0)
      orders[k] = std::log2(errors[k - 1] / errors[k]);
  }
  return orders;
}

namespace {

ConvergenceReport assemble_report(const std::vector<double>& h_or_dt,
                                  const std::vector<TrackedErrors>& errs,
                                  std::string reference_desc) {
  std::vector<double> e11, e12, er;
  for (const TrackedErrors& e : errs) {
    e11.push_back(e.q11);
    e12.push_back(e.q12);
    er.push_back(e.r);
  }
  std::vector<double> o11 = convergence_orders(e11);
  std::vector<double> o12 = convergence_orders(e12);
  std::vector<double> orr = convergence_orders(er);
  ConvergenceReport rep;
  rep.reference_desc = std::move(reference_desc);
  for (size_t k = 0; k < h_or_dt.size(); ++k)
    rep.rows.push_back(ConvergenceRow{h_or_dt[k], e11[k], o11[k], e12[k],
                                      o12[k], er[k], orr[k]});
  return rep;
}

std::vector<RunOutput> run_ladder(const std::vector<ExperimentSpec>& specs,
                                  const SolverConfig& cfg, int workers) {
  std::vector<RunOutput> outs(specs.size());
  if (workers <= 1) {
    for (size_t i = 0; i < specs.size(); ++i)
      outs[i] = run_experiment(specs[i], cfg);
    return outs;
  }
  std::vector<std::future<RunOutput>> futs;
  for (const ExperimentSpec& s : specs)
    futs.push_back(std::async(std::launch::async,
                              [&cfg, s] { return run_experiment(s, cfg); }));
  for (size_t i = 0; i < futs.size(); ++i) outs[i] = futs[i].get();
  return outs;
}

}  // namespace

SpaceStudySpec desk_space_study() {
  SpaceStudySpec s;
  s.base = experiment_preset(InitialCondition::example1);
  s.base.snapshot_times.clear();
  s.ladder_cells = {10, 20, 40};
  s.ladder_steps = 400;
  s.reference_cells = 160;
  s.reference_steps = 1600;
  return s;
}

SpaceStudySpec paper_space_study() {
  SpaceStudySpec s = desk_space_study();
  s.ladder_cells = {10, 20, 40, 80};
  s.reference_cells = 400;
  s.reference_steps = 4000;
  return s;
}

ConvergenceReport run_convergence_space(const SpaceStudySpec& spec,
                                        const SolverConfig& cfg,
                                        int workers) {
  for (int n : spec.ladder_cells)
    if (spec.reference_cells % n != 0)
      throw ConfigError("space study: ladder grid does not nest in reference");
  std::vector<ExperimentSpec> runs;
  for (int n : spec.ladder_cells) {
    ExperimentSpec e = spec.base;
    e.cells = n;
    e.steps = spec.ladder_steps;
    e.snapshot_times.clear();
    runs.push_back(e);
  }
  ExperimentSpec ref = spec.base;
  ref.cells = spec.reference_cells;
  ref.steps = spec.reference_steps;
  ref.snapshot_times.clear();
  runs.push_back(ref);

  std::vector<RunOutput> outs = run_ladder(runs, cfg, workers);
  const SchemeState& rstate = outs.back().state;
  std::vector<double> hs;
  std::vector<TrackedErrors> errs;
  for (size_t k = 0; k + 1 < outs.size(); ++k) {
    hs.push_back(runs[k].grid().h);
    errs.push_back(l2_errors(outs[k].state, rstate));
  }
  std::ostringstream os;
  os << "reference: n=" << spec.reference_cells << " steps="
     << spec.reference_steps << " T=" << spec.base.T;
  return assemble_report(hs, errs, os.str());
}

TimeStudySpec desk_time_study() {
  TimeStudySpec s;
  s.base = experiment_preset(InitialCondition::example1);
  s.base.snapshot_times.clear();
  s.base.cells = 50;
  s.ladder_steps = {40, 80, 160, 320};
  s.reference_steps = 1280;
  return s;
}

TimeStudySpec paper_time_study() {
  TimeStudySpec s = desk_time_study();
  s.base.cells = 100;
  s.ladder_steps = {40, 80, 160, 320, 640};
  s.reference_steps = 8000;
  return s;
}

ConvergenceReport run_convergence_time(const TimeStudySpec& spec,
                                       const SolverConfig& cfg, int workers) {
  std::vector<ExperimentSpec> runs;
  for (int steps : spec.ladder_steps) {
    ExperimentSpec e = spec.base;
    e.steps = steps;
    e.snapshot_times.clear();
    runs.push_back(e);
  }
  ExperimentSpec ref = spec.base;
  ref.steps = spec.reference_steps;
  ref.snapshot_times.clear();
  runs.push_back(ref);

  std::vector<RunOutput> outs = run_ladder(runs, cfg, workers);
  const SchemeState& rstate = outs.back().state;
  std::vector<double> dts;
  std::vector<TrackedErrors> errs;
  for (size_t k = 0; k + 1 < outs.size(); ++k) {
    dts.push_back(spec.base.T / runs[k].steps);
    errs.push_back(l2_errors(outs[k].state, rstate));
  }
  std::ostringstream os;
  os << "reference: n=" << spec.base.cells << " steps=" << spec.reference_steps
     << " T=" << spec.base.T;
  return assemble_report(dts, errs, os.str());
}

std::vector<DefectSite> locate_defects(const Field& lambda_max,
                                       double threshold_frac) {
  if (!(threshold_frac > 0.0))
    throw ArgumentError("locate_defects: threshold must be positive");
  const GridSpec& g = lambda_max.grid();
  if (g.dim != 2 || lambda_max.comps() != 1)
    throw ArgumentError("locate_defects: 2D scalar field expected");
  const int N = g.n_interior;

  std::vector<double> vals;
  vals.reserve(static_cast<size_t>(N) * N);
  for (int j = 1; j <= N; ++j)
    for (int i = 1; i <= N; ++i) vals.push_back(lambda_max.at(i, j)[0]);
  std::nth_element(vals.begin(), vals.begin() + vals.size() / 2, vals.end());
  const double median = vals[vals.size() / 2];
  const double cutoff = threshold_frac * median;

  auto idx = [N](int i, int j) { return (j - 1) * N + (i - 1); };
  std::vector<int> label(static_cast<size_t>(N) * N, 0);
  std::vector<DefectSite> sites;
  std::vector<std::pair<int, int>> stack;
  for (int j0 = 1; j0 <= N; ++j0)
    for (int i0 = 1; i0 <= N; ++i0) {
      if (label[idx(i0, j0)] != 0) continue;
      if (!(lambda_max.at(i0, j0)[0] < cutoff)) continue;
      // Flood fill one component.
      stack.clear();
      stack.emplace_back(i0, j0);
      label[idx(i0, j0)] = 1;
      double cx = 0.0, cy = 0.0;
      int count = 0;
      bool touches_ring = false;
      while (!stack.empty()) {
        auto [i, j] = stack.back();
        stack.pop_back();
        cx += g.coord(i, 0);
        cy += g.coord(j, 1);
        ++count;
        if (i == 1 || i == N || j == 1 || j == N) touches_ring = true;
        const int di[4] = {1, -1, 0, 0};
        const int dj[4] = {0, 0, 1, -1};
        for (int t = 0; t < 4; ++t) {
          int ni = i + di[t], nj = j + dj[t];
          if (ni < 1 || ni > N || nj < 1 || nj > N) continue;
          if (label[idx(ni, nj)] != 0) continue;
          if (!(lambda_max.at(ni, nj)[0] < cutoff)) continue;
          label[idx(ni, nj)] = 1;
          stack.emplace_back(ni, nj);
        }
      }
      if (!touches_ring)
        sites.push_back(DefectSite{cx / count, cy / count, count});
    }
  return sites;
}

}  // namespace qgf
