// Command-line front end: run, convergence-space, convergence-time,
// verify.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "qgf/config.hpp"
#include "qgf/io.hpp"
#include "qgf/verify.hpp"

namespace fs = std::filesystem;
using namespace qgf;

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir;
  bool deterministic = false;
  bool fast_reductions = false;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int workers = 0;
  bool paper_scale = false;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--config", a.config_path, "key=value config file");
  cmd->add_option("--set", a.sets, "set/override key=value (repeatable)");
  cmd->add_option("--out", a.out_dir, "output directory");
  cmd->add_option("--workers", a.workers, "parallel ladder workers");
  cmd->add_flag("--deterministic", a.deterministic,
                "fixed-order reductions (bit-reproducible runs; default)");
  cmd->add_flag("--fast-reductions", a.fast_reductions,
                "blocked-order reductions");
  cmd->add_option("--seed", a.seed, "seed for randomized subcommands")
      ->each([&a](const std::string&) { a.seed_given = true; });
}

RunConfig resolve(const CommonArgs& a, const std::string& default_experiment) {
  std::vector<std::string> sets = a.sets;
  if (!a.out_dir.empty()) sets.push_back("output.dir=" + a.out_dir);
  if (a.deterministic) sets.push_back("run.deterministic=true");
  if (a.fast_reductions) sets.push_back("run.deterministic=false");
  if (a.seed_given) sets.push_back("run.seed=" + std::to_string(a.seed));
  if (a.workers > 0) sets.push_back("run.workers=" + std::to_string(a.workers));
  if (a.paper_scale) sets.push_back("run.paper_scale=true");
  RunConfig rc = parse_config(a.config_path, sets, default_experiment);
  set_reduction_mode(rc.deterministic ? ReductionMode::deterministic
                                      : ReductionMode::blocked);
  return rc;
}

void print_log(const RunConfig& rc) {
  for (const std::string& line : rc.log) std::cout << "  " << line << "\n";
}

std::string snap_name(const std::string& prefix, int step) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s_%06d.field", prefix.c_str(), step);
  return buf;
}

struct DumpSink : SnapshotSink {
  fs::path dir;
  std::vector<std::string> echo;
  void on_snapshot(int step, double time, const SchemeState& st) override {
    write_field((dir / snap_name("q", step)).string(), st.q, time, echo);
    write_field((dir / snap_name("r", step)).string(), st.r, time, echo);
    if (st.q.grid().dim == 2) {
      Field lam = lambda_max_field(st.q);
      write_field((dir / snap_name("lambda_max", step)).string(), lam, time,
                  echo);
      Field dirf = Field::vector(st.q.grid());
      const int N = st.q.grid().n_interior;
      for (int j = 0; j <= N + 1; ++j)
        for (int i = 0; i <= N + 1; ++i) {
          Director d = director_2x2(st.q.at(i, j));
          dirf.at(i, j)[0] = d.isotropic ? 0.0 : d.nx;
          dirf.at(i, j)[1] = d.isotropic ? 0.0 : d.ny;
        }
      write_field((dir / snap_name("director", step)).string(), dirf, time,
                  echo);
    }
  }
};

int cmd_run(const CommonArgs& args) {
  RunConfig rc = resolve(args, "");
  std::cout << "resolved configuration:\n";
  print_log(rc);

  fs::path dir(rc.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  // Fail fast before any stepping if the directory is not writable.
  {
    std::ofstream probe(dir / "energy.csv", std::ios::binary);
    if (!probe)
      throw IoError("output directory is not writable: " + rc.out_dir);
  }

  DumpSink sink;
  sink.dir = dir;
  sink.echo = rc.echo();
  RunOutput out = run_experiment(rc.spec, rc.solver, &sink);
  write_energy_csv((dir / "energy.csv").string(), out.trace, rc.echo());

  const EnergyRow& last = out.trace.back();
  Diagnostics diag = diagnostics(out.state);
  std::cout << "run " << rc.spec.name << ": " << rc.spec.steps
            << " steps to T=" << format_double(rc.spec.T) << "\n";
  std::cout << "  energy " << format_double(out.e0) << " -> "
            << format_double(last.energy) << "\n";
  std::cout << "  max |dissipation residual| "
            << format_double(out.max_abs_dissipation_residual) << "\n";
  std::cout << "  trace drift " << format_double(diag.trace_drift)
            << ", sym drift " << format_double(diag.sym_drift) << "\n";
  std::cout << "  min r " << format_double(diag.min_r) << ", max |Q|_F "
            << format_double(diag.max_q_frob) << "\n";
  std::cout << "  time-derivative bound "
            << (out.timederiv_bound_ok ? "ok" : "VIOLATED")
            << ", growth bound " << (out.growth_bound_ok ? "ok" : "VIOLATED")
            << "\n";
  std::cout << "  wrote " << (dir / "energy.csv").string() << "\n";
  return 0;
}

void print_report(const ConvergenceReport& rep) {
  std::printf("%12s %12s %9s %12s %9s %12s %9s\n", "h_or_dt", "err_Q11",
              "ord_Q11", "err_Q12", "ord_Q12", "err_r", "ord_r");
  for (const ConvergenceRow& r : rep.rows)
    std::printf("%12.6g %12.6g %9.4f %12.6g %9.4f %12.6g %9.4f\n", r.h_or_dt,
                r.err_q11, r.ord_q11, r.err_q12, r.ord_q12, r.err_r, r.ord_r);
  std::printf("(%s)\n", rep.reference_desc.c_str());
}

int cmd_convergence(const CommonArgs& args, bool space) {
  RunConfig rc = resolve(args, "example1");
  std::cout << "resolved configuration:\n";
  print_log(rc);

  fs::path dir(rc.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);

  ConvergenceReport rep;
  if (space) {
    SpaceStudySpec s = rc.paper_scale ? paper_space_study() : desk_space_study();
    s.base = rc.spec;
    if (!rc.study_ladder.empty()) s.ladder_cells = rc.study_ladder;
    if (rc.study_steps > 0) s.ladder_steps = rc.study_steps;
    else s.ladder_steps = rc.spec.steps;
    if (rc.study_reference_n > 0) s.reference_cells = rc.study_reference_n;
    else if (!rc.paper_scale) s.reference_cells = 160;
    if (rc.study_reference_steps > 0)
      s.reference_steps = rc.study_reference_steps;
    rep = run_convergence_space(s, rc.solver, rc.workers);
  } else {
    TimeStudySpec s = rc.paper_scale ? paper_time_study() : desk_time_study();
    s.base = rc.spec;
    if (!rc.grid_n_explicit) s.base.cells = rc.paper_scale ? 100 : 50;
    if (!rc.study_ladder.empty()) s.ladder_steps = rc.study_ladder;
    if (rc.study_reference_steps > 0)
      s.reference_steps = rc.study_reference_steps;
    rep = run_convergence_time(s, rc.solver, rc.workers);
  }
  print_report(rep);
  std::string csv =
      (dir / (space ? "convergence_space.csv" : "convergence_time.csv"))
          .string();
  write_convergence_csv(csv, rep, rc.echo());
  std::cout << "wrote " << csv << "\n";
  return 0;
}

int cmd_verify(const CommonArgs& args, bool inject) {
  VerifyOptions opts;
  opts.seed = args.seed_given ? args.seed : 1;
  opts.inject_alpha_sign_error = inject;
  set_reduction_mode(ReductionMode::deterministic);
  std::vector<PropertyResult> results = run_verify_battery(opts);
  int failures = 0;
  for (const PropertyResult& r : results) {
    std::printf("[%s] %-28s %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                r.detail.c_str());
    if (!r.pass) ++failures;
  }
  std::printf("%d/%zu properties passed\n",
              static_cast<int>(results.size()) - failures, results.size());
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-difference Q-tensor gradient flow solver"};
  app.require_subcommand(1);

  CommonArgs run_args, cs_args, ct_args, verify_args;
  bool inject_alpha = false;

  CLI::App* run = app.add_subcommand("run", "run one simulation");
  add_common(run, run_args);

  CLI::App* cs = app.add_subcommand("convergence-space",
                                    "spatial refinement study");
  add_common(cs, cs_args);
  cs->add_flag("--paper-scale", cs_args.paper_scale,
               "full-size reference run");

  CLI::App* ct = app.add_subcommand("convergence-time",
                                    "temporal refinement study");
  add_common(ct, ct_args);
  ct->add_flag("--paper-scale", ct_args.paper_scale,
               "full-size reference run");

  CLI::App* ver = app.add_subcommand("verify", "run the property battery");
  add_common(ver, verify_args);
  ver->add_flag("--inject-alpha-sign-error", inject_alpha,
                "test hook: break the alpha operator")
      ->group("");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (cs->parsed()) return cmd_convergence(cs_args, true);
    if (ct->parsed()) return cmd_convergence(ct_args, false);
    if (ver->parsed()) return cmd_verify(verify_args, inject_alpha);
  } catch (const ConfigError& e) {
    std::cerr << "error (config): " << e.what() << "\n";
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "error (solver): " << e.what() << "\n";
    return 3;
  } catch (const IntegrityError& e) {
    std::cerr << "error (integrity): " << e.what() << "\n";
    return 4;
  } catch (const QuadratizationError& e) {
    std::cerr << "error (quadratization): " << e.what() << "\n";
    return 5;
  } catch (const IoError& e) {
    std::cerr << "error (io): " << e.what() << "\n";
    return 6;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
