// config.hpp
// Flat key=value run configuration with section prefixes (model., grid.,
// time., solver., output., run., study.). Resolution order: built-in
// defaults, experiment preset, config file, then --set overrides; every
// resolved value is echoed to the log with its provenance.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qgf/experiments.hpp"

namespace qgf {

struct RunConfig {
  ExperimentSpec spec;
  SolverConfig solver;
  std::string out_dir = "out";
  bool deterministic = true;
  std::uint64_t seed = 1u;
  int workers = 1;
  bool paper_scale = false;

  // Study shape (for the convergence subcommands); empty = desk defaults.
  std::vector<int> study_ladder;
  int study_reference_n = 0;
  int study_reference_steps = 0;
  int study_steps = 0;

  bool grid_n_explicit = false;  // grid.n came from file/override

  std::vector<std::string> log;  // resolved key=value (source) lines
  std::vector<std::string> echo() const;  // key=value lines for file headers
};

// `file_path` empty means no config file. `overrides` are raw key=value
// strings from repeated --set flags (applied last, in order).
// `default_experiment` seeds the experiment key when neither file nor
// overrides pick one (used by the convergence subcommands).
RunConfig parse_config(const std::string& file_path,
                       const std::vector<std::string>& overrides,
                       const std::string& default_experiment = "");

}  // namespace qgf
