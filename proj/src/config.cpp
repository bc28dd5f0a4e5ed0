#include "qgf/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "qgf/io.hpp"

namespace qgf {

namespace {

struct Entry {
  std::string value;
  std::string source;  // "default", "preset", "file", "override"
};

using KvMap = std::map<std::string, Entry>;

void put(KvMap& kv, const std::string& key, const std::string& value,
         const std::string& source) {
  kv[key] = Entry{value, source};
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

void parse_line(KvMap& kv, const std::string& raw, const std::string& source,
                int lineno) {
  std::string line = trim(raw);
  if (line.empty() || line[0] == '#') return;
  size_t eq = line.find('=');
  if (eq == std::string::npos) {
    std::ostringstream os;
    os << "config: missing '=' in \"" << raw << "\"";
    if (lineno > 0) os << " (line " << lineno << ")";
    throw ConfigError(os.str());
  }
  std::string key = trim(line.substr(0, eq));
  std::string value = trim(line.substr(eq + 1));
  if (key.empty() || value.empty())
    throw ConfigError("config: empty key or value in \"" + raw + "\"");
  put(kv, key, value, source);
}

double as_double(const KvMap& kv, const std::string& key) {
  const std::string& v = kv.at(key).value;
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: bad number for " + key + ": " + v);
  }
}

long as_long(const KvMap& kv, const std::string& key) {
  const std::string& v = kv.at(key).value;
  try {
    size_t pos = 0;
    long d = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer for " + key + ": " + v);
  }
}

bool as_bool(const KvMap& kv, const std::string& key) {
  const std::string& v = kv.at(key).value;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: bad boolean for " + key + ": " + v);
}

std::vector<double> as_double_list(const KvMap& kv, const std::string& key) {
  std::vector<double> out;
  std::istringstream is(kv.at(key).value);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError("config: bad list entry for " + key + ": " + tok);
    }
  }
  return out;
}

std::vector<int> as_int_list(const KvMap& kv, const std::string& key) {
  std::vector<int> out;
  for (double d : as_double_list(kv, key)) out.push_back(static_cast<int>(d));
  return out;
}

const char* const kKnownKeys[] = {
    "experiment",     "model.a",         "model.b",
    "model.c",        "model.A0",        "model.M",
    "model.L1",       "model.L2",        "model.L3",
    "model.L",        "grid.dim",        "grid.n",
    "grid.side",      "time.dt",         "time.steps",
    "time.T",         "solver.rel_tol",  "solver.max_iters",
    "solver.precond", "output.dir",      "output.snapshots",
    "run.deterministic", "run.seed",     "run.workers",
    "run.paper_scale", "study.ladder",   "study.reference_n",
    "study.reference_steps", "study.steps"};

}  // namespace

std::vector<std::string> RunConfig::echo() const { return log; }

RunConfig parse_config(const std::string& file_path,
                       const std::vector<std::string>& overrides,
                       const std::string& default_experiment) {
  KvMap kv;
  // Built-in defaults: the standard parameter set. Grid size has no
  // default; a run without an experiment preset must provide it.
  put(kv, "model.a", "-0.3", "default");
  put(kv, "model.b", "-4", "default");
  put(kv, "model.c", "4", "default");
  put(kv, "model.A0", "500", "default");
  put(kv, "model.M", "1", "default");
  put(kv, "solver.rel_tol", "1e-10", "default");
  put(kv, "solver.max_iters", "0", "default");
  put(kv, "solver.precond", "jacobi", "default");
  put(kv, "output.dir", "out", "default");
  put(kv, "run.deterministic", "true", "default");
  put(kv, "run.seed", "1", "default");
  put(kv, "run.workers", "1", "default");
  put(kv, "run.paper_scale", "false", "default");
  put(kv, "grid.dim", "2", "default");

  // Peek at experiment choice from file/overrides before layering, so the
  // preset sits between defaults and explicit settings.
  KvMap explicit_kv;
  if (!file_path.empty()) {
    std::ifstream is(file_path);
    if (!is) throw ConfigError("config: cannot read file " + file_path);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) parse_line(explicit_kv, line, "file", ++lineno);
  }
  for (const std::string& ov : overrides) parse_line(explicit_kv, ov, "override", 0);

  RunConfig rc;
  std::string exp_key;
  std::string exp_source;
  auto exp_it = explicit_kv.find("experiment");
  if (exp_it != explicit_kv.end()) {
    exp_key = exp_it->second.value;
    exp_source = exp_it->second.source;
  } else if (!default_experiment.empty()) {
    exp_key = default_experiment;
    exp_source = "default";
  }
  if (!exp_key.empty()) {
    InitialCondition ic;
    try {
      ic = initial_condition_from_key(exp_key);
    } catch (const ArgumentError& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    ExperimentSpec preset = experiment_preset(ic);
    rc.spec = preset;
    put(kv, "experiment", exp_key, exp_source);
    put(kv, "grid.n", std::to_string(preset.cells), "preset");
    put(kv, "grid.side", format_double(preset.side), "preset");
    put(kv, "time.steps", std::to_string(preset.steps), "preset");
    put(kv, "time.T", format_double(preset.T), "preset");
    put(kv, "model.a", format_double(preset.params.a), "preset");
    put(kv, "model.b", format_double(preset.params.b), "preset");
    put(kv, "model.c", format_double(preset.params.c), "preset");
    put(kv, "model.A0", format_double(preset.params.A0), "preset");
    put(kv, "model.M", format_double(preset.params.M), "preset");
    put(kv, "model.L1", format_double(preset.params.L1), "preset");
    std::ostringstream snaps;
    for (size_t i = 0; i < preset.snapshot_times.size(); ++i)
      snaps << (i ? "," : "") << format_double(preset.snapshot_times[i]);
    if (!preset.snapshot_times.empty())
      put(kv, "output.snapshots", snaps.str(), "preset");
  }
  // L2/L3 default to zero unless set.
  if (!kv.count("model.L1")) put(kv, "model.L1", "0.001", "default");
  if (!kv.count("model.L2")) put(kv, "model.L2", "0", "default");
  if (!kv.count("model.L3")) put(kv, "model.L3", "0", "default");

  for (const auto& [key, entry] : explicit_kv) {
    bool known = false;
    for (const char* k : kKnownKeys)
      if (key == k) {
        known = true;
        break;
      }
    if (!known) throw ConfigError("config: unknown key \"" + key + "\"");
    put(kv, key, entry.value, entry.source);
  }

  // model.L shorthand: effective 2D elastic constant.
  if (kv.count("model.L")) {
    put(kv, "model.L1", kv.at("model.L").value, kv.at("model.L").source);
    put(kv, "model.L2", "0", kv.at("model.L").source);
    put(kv, "model.L3", "0", kv.at("model.L").source);
    kv.erase("model.L");
  }

  ExperimentSpec& spec = rc.spec;
  spec.dim = static_cast<int>(as_long(kv, "grid.dim"));
  if (!kv.count("grid.n"))
    throw ConfigError("config: missing grid size (grid.n)");
  rc.grid_n_explicit = kv.at("grid.n").source == "file" ||
                       kv.at("grid.n").source == "override";
  spec.cells = static_cast<int>(as_long(kv, "grid.n"));
  if (spec.cells < 2) throw ConfigError("config: grid.n must be >= 2");
  if (kv.count("grid.side")) spec.side = as_double(kv, "grid.side");
  if (!(spec.side > 0.0)) throw ConfigError("config: grid.side must be > 0");

  ModelParams& p = spec.params;
  p.dim = spec.dim;
  p.a = as_double(kv, "model.a");
  p.b = as_double(kv, "model.b");
  p.c = as_double(kv, "model.c");
  p.A0 = as_double(kv, "model.A0");
  p.M = as_double(kv, "model.M");
  p.L1 = as_double(kv, "model.L1");
  p.L2 = as_double(kv, "model.L2");
  p.L3 = as_double(kv, "model.L3");

  // 2D runs fold the divergence elastic constants into L1.
  if (spec.dim == 2 && p.L2 + p.L3 != 0.0) {
    p.L1 += 0.5 * (p.L2 + p.L3);
    p.L2 = 0.0;
    p.L3 = 0.0;
    rc.log.push_back("note: 2D run, folded L2,L3 into L1 = " +
                     format_double(p.L1));
  }

  // Time block: any two of dt/steps/T determine the third. When all
  // three are present, the lowest-provenance one yields (so an explicit
  // dt beats a preset T, say); a genuine three-way conflict at equal
  // provenance is an error.
  auto rank_of = [&](const char* key) {
    if (!kv.count(key)) return -1;
    const std::string& s = kv.at(key).source;
    if (s == "override") return 3;
    if (s == "file") return 2;
    if (s == "preset") return 1;
    return 0;
  };
  int rk_dt = rank_of("time.dt"), rk_steps = rank_of("time.steps"),
      rk_T = rank_of("time.T");
  bool has_dt = rk_dt >= 0, has_steps = rk_steps >= 0, has_T = rk_T >= 0;
  double dt = has_dt ? as_double(kv, "time.dt") : 0.0;
  long steps = has_steps ? as_long(kv, "time.steps") : 0;
  double T = has_T ? as_double(kv, "time.T") : 0.0;
  if (has_dt && !(dt > 0.0)) throw ConfigError("config: time.dt must be > 0");
  if (has_steps && steps < 1)
    throw ConfigError("config: time.steps must be >= 1");
  if (has_T && !(T > 0.0)) throw ConfigError("config: time.T must be > 0");
  if (has_dt && has_steps && has_T) {
    if (rk_dt == rk_steps && rk_steps == rk_T) {
      if (std::fabs(T - steps * dt) > 1e-12 * std::fmax(1.0, T))
        throw ConfigError("config: time.T != time.steps * time.dt");
    } else {
      // Drop the weakest entry; ties prefer dropping steps, then T.
      int low = std::min({rk_dt, rk_steps, rk_T});
      if (rk_steps == low) has_steps = false;
      else if (rk_T == low) has_T = false;
      else has_dt = false;
    }
  }
  if (has_dt && has_steps && has_T) {
    // consistent triple, keep as given
  } else if (has_steps && has_T) {
    // dt derived below
  } else if (has_dt && has_steps) {
    T = steps * dt;
    rc.log.push_back("note: time.T derived as " + format_double(T));
  } else if (has_dt && has_T) {
    steps = std::lround(T / dt);
    if (steps < 1 || std::fabs(steps * dt - T) > 1e-9 * std::fmax(1.0, T))
      throw ConfigError("config: time.T is not a multiple of time.dt");
    rc.log.push_back("note: time.steps derived as " + std::to_string(steps));
  } else {
    throw ConfigError("config: need two of time.dt, time.steps, time.T");
  }
  spec.steps = static_cast<int>(steps);
  spec.T = T;

  // Snapshot schedule with nearest-step snapping.
  spec.snapshot_times.clear();
  if (kv.count("output.snapshots")) {
    double step_dt = spec.T / spec.steps;
    for (double t : as_double_list(kv, "output.snapshots")) {
      if (t < -1e-12 || t > spec.T * (1.0 + 1e-12))
        throw ConfigError("config: snapshot time outside [0, T]: " +
                          format_double(t));
      long s = std::lround(t / step_dt);
      double snapped = s * step_dt;
      if (std::fabs(snapped - t) > 1e-9 * std::fmax(1.0, spec.T))
        rc.log.push_back("note: snapshot time " + format_double(t) +
                         " snapped to step " + std::to_string(s) + " (t=" +
                         format_double(snapped) + ")");
      spec.snapshot_times.push_back(snapped);
    }
  }
  if (kv.count("experiment")) spec.name = kv.at("experiment").value;
  else spec.name = "custom";

  rc.solver.rel_tolerance = as_double(kv, "solver.rel_tol");
  rc.solver.max_iterations = static_cast<int>(as_long(kv, "solver.max_iters"));
  const std::string& prec = kv.at("solver.precond").value;
  if (prec == "none") rc.solver.preconditioner = SolverConfig::Precond::none;
  else if (prec == "jacobi")
    rc.solver.preconditioner = SolverConfig::Precond::jacobi;
  else throw ConfigError("config: solver.precond must be none or jacobi");

  rc.out_dir = kv.at("output.dir").value;
  rc.deterministic = as_bool(kv, "run.deterministic");
  rc.seed = static_cast<std::uint64_t>(as_long(kv, "run.seed"));
  rc.workers = static_cast<int>(as_long(kv, "run.workers"));
  if (rc.workers < 1) throw ConfigError("config: run.workers must be >= 1");
  rc.paper_scale = as_bool(kv, "run.paper_scale");

  if (kv.count("study.ladder")) rc.study_ladder = as_int_list(kv, "study.ladder");
  if (kv.count("study.reference_n"))
    rc.study_reference_n = static_cast<int>(as_long(kv, "study.reference_n"));
  if (kv.count("study.reference_steps"))
    rc.study_reference_steps =
        static_cast<int>(as_long(kv, "study.reference_steps"));
  if (kv.count("study.steps"))
    rc.study_steps = static_cast<int>(as_long(kv, "study.steps"));

  // Validate the assembled pieces (c > 0, L1 > 0, dt > 0, ...).
  try {
    spec.validate();
    rc.solver.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  // Resolved echo, provenance included.
  std::vector<std::string> keys;
  for (const auto& [key, entry] : kv) keys.push_back(key);
  for (const std::string& key : keys) {
    const Entry& e = kv.at(key);
    rc.log.push_back(key + "=" + e.value + " (" + e.source + ")");
  }
  std::ostringstream derived;
  derived << "time.dt=" << format_double(spec.T / spec.steps) << " (derived)";
  rc.log.push_back(derived.str());
  return rc;
}

}  // namespace qgf
