// experiments.hpp
// The 2D experiment catalog: director-based initial conditions, full
// simulation runs with energy traces and snapshots, nested-grid L2
// errors, refinement studies, and eigenvalue/defect extraction.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qgf/initial.hpp"
#include "qgf/scheme.hpp"

namespace qgf {

enum class InitialCondition { example1, example2_defect, example3_hole, zero };

InitialCondition initial_condition_from_key(const std::string& key);
std::string initial_condition_key(InitialCondition ic);

// Evaluates the keyed director formula and returns
// Q0 = n0 n0^T - (|n0|^2/2) I2 (row-major 2x2 in `out`).
void initial_condition(InitialCondition ic, double x, double y, double* out);

MatrixFn initial_condition_fn(InitialCondition ic);

struct ExperimentSpec {
  std::string name;
  InitialCondition ic = InitialCondition::example1;
  int dim = 2;
  double side = 2.0;
  std::array<double, 3> origin{0.0, 0.0, 0.0};
  int cells = 80;  // grid intervals per axis; h = side/cells
  int steps = 400;
  double T = 0.4;
  ModelParams params;  // dt is derived: T/steps
  std::vector<double> snapshot_times;

  GridSpec grid() const {
    return GridSpec::cube(dim, cells, side, origin);
  }
  ModelParams resolved_params() const {
    ModelParams p = params;
    p.dim = dim;
    p.dt = T / steps;
    return p;
  }
  void validate() const;
};

ExperimentSpec experiment_preset(InitialCondition ic);

struct EnergyRow {
  int step = 0;
  double time = 0.0;
  double energy = 0.0;
  double dissipation_residual = 0.0;
  double trace_drift = 0.0;
  double sym_drift = 0.0;
  int cg_iters = 0;
  double cg_residual = 0.0;
};

struct SnapshotSink {
  virtual void on_snapshot(int step, double time, const SchemeState& st) = 0;
  virtual ~SnapshotSink() = default;
};

struct RunOutput {
  std::vector<EnergyRow> trace;  // row per step, step 0 included
  SchemeState state;             // final state
  double e0 = 0.0;
  double max_abs_dissipation_residual = 0.0;
  double dtq_sum = 0.0;           // dt * sum_n ||D_t+ Q^n||_h^2
  bool timederiv_bound_ok = true; // dtq_sum <= M E^0 (round-off slack)
  bool growth_bound_ok = true;    // ||Q^m|| <= sqrt(T) sqrt(dtq_sum)+||Q^0||
};

RunOutput run_experiment(const ExperimentSpec& spec, const SolverConfig& cfg,
                         SnapshotSink* sink = nullptr);

// lambda_max = sqrt(Q11^2 + Q12^2) for symmetric trace-free 2x2.
double largest_eigenvalue_2x2(const double* q);

struct Director {
  double nx = 0.0, ny = 0.0;
  bool isotropic = false;  // Q == 0: eigenvector undefined
};
Director director_2x2(const double* q);

Field lambda_max_field(const Field& q);  // scalar field over real nodes

// L2 error of one component between a coarse field and a reference on a
// nested finer grid, sampled at coincident nodes:
//   sqrt(h_coarse^d * sum_nodes diff^2).
double l2_error_component(const Field& coarse, const Field& reference,
                          int comp);

struct TrackedErrors {
  double q11 = 0.0, q12 = 0.0, r = 0.0;
};
TrackedErrors l2_errors(const SchemeState& coarse, const SchemeState& reference);

// order_k = log2(e_{k-1}/e_k); first entry NaN, nonpositive errors NaN.
std::vector<double> convergence_orders(const std::vector<double>& errors);

struct ConvergenceRow {
  double h_or_dt = 0.0;
  double err_q11 = 0.0, ord_q11 = 0.0;
  double err_q12 = 0.0, ord_q12 = 0.0;
  double err_r = 0.0, ord_r = 0.0;
};
struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  std::string reference_desc;
};

struct SpaceStudySpec {
  ExperimentSpec base;          // grid size fields ignored for the ladder
  std::vector<int> ladder_cells{10, 20, 40};
  int ladder_steps = 400;
  int reference_cells = 160;
  int reference_steps = 1600;
};
SpaceStudySpec desk_space_study();
SpaceStudySpec paper_space_study();
ConvergenceReport run_convergence_space(const SpaceStudySpec& spec,
                                        const SolverConfig& cfg,
                                        int workers = 1);

struct TimeStudySpec {
  ExperimentSpec base;
  std::vector<int> ladder_steps{40, 80, 160, 320};
  int reference_steps = 1280;
};
TimeStudySpec desk_time_study();
TimeStudySpec paper_time_study();
ConvergenceReport run_convergence_time(const TimeStudySpec& spec,
                                       const SolverConfig& cfg,
                                       int workers = 1);

// Connected components (4-neighbor) of interior nodes whose lambda_max
// falls below threshold_frac * median(interior lambda_max), reported as
// centroids. Components touching the first interior ring are the
// boundary layer, not defects, and are discarded. The default fraction
// is calibrated on the defect example: larger fractions let the
// Dirichlet boundary layer swallow the interior minima.
struct DefectSite {
  double x = 0.0, y = 0.0;
  int nodes = 0;
};
std::vector<DefectSite> locate_defects(const Field& lambda_max,
                                       double threshold_frac = 0.02);

}  // namespace qgf
