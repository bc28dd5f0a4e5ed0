// io.hpp
// Output formats.
//
// Field dump: plain-text header lines "key value" covering dim,
// n_interior, h, components and time, optional "config ..." echo lines,
// then a "data" line followed by little-endian 64-bit floats in row-major
// node order (nodes 0..N+1 per axis, components contiguous per node).
//
// CSVs: comma separated, '.' decimal, LF line endings, header row, with
// "# key=value" configuration echo comments on top. Doubles are printed
// with round-trip precision so identical runs produce identical bytes.

#pragma once

#include <string>
#include <vector>

#include "qgf/experiments.hpp"
#include "qgf/field.hpp"

namespace qgf {

void write_field(const std::string& path, const Field& f, double time,
                 const std::vector<std::string>& config_echo = {});

struct LoadedField {
  Field field;
  double time = 0.0;
};
LoadedField read_field(const std::string& path);

void write_energy_csv(const std::string& path,
                      const std::vector<EnergyRow>& rows,
                      const std::vector<std::string>& config_echo = {});

void write_convergence_csv(const std::string& path,
                           const ConvergenceReport& report,
                           const std::vector<std::string>& config_echo = {});

std::string format_double(double v);  // shortest round-trip form

}  // namespace qgf
