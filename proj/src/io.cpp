#include "qgf/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace qgf {

static_assert(std::endian::native == std::endian::little,
              "field dumps are little-endian; byte swapping not implemented");

std::string format_double(double v) {
  char buf[40];
  // Shortest representation that round-trips.
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v || (v != v && back != back)) return buf;
  }
  return buf;
}

void write_field(const std::string& path, const Field& f, double time,
                 const std::vector<std::string>& config_echo) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  const GridSpec& g = f.grid();
  os << "dim " << g.dim << "\n";
  os << "n_interior " << g.n_interior << "\n";
  os << "h " << format_double(g.h) << "\n";
  os << "side " << format_double(g.side) << "\n";
  os << "components " << f.comps() << "\n";
  os << "time " << format_double(time) << "\n";
  for (const std::string& line : config_echo) os << "config " << line << "\n";
  os << "data\n";
  const int N = g.n_interior;
  const int klo = 0, khi = (g.dim == 3) ? N + 1 : 0;
  for (int k = klo; k <= khi; ++k)
    for (int j = 0; j <= N + 1; ++j)
      os.write(reinterpret_cast<const char*>(f.at(0, j, k)),
               static_cast<std::streamsize>(sizeof(double)) * (N + 2) *
                   f.comps());
  if (!os) throw IoError("write failed: " + path);
}

LoadedField read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for reading: " + path);
  int dim = 0, n_interior = -1, comps = 0;
  double h = 0.0, side = 0.0, time = 0.0;
  std::string line;
  while (std::getline(is, line)) {
    if (line == "data") break;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "dim") ls >> dim;
    else if (key == "n_interior") ls >> n_interior;
    else if (key == "h") ls >> h;
    else if (key == "side") ls >> side;
    else if (key == "components") ls >> comps;
    else if (key == "time") ls >> time;
    else if (key == "config") continue;
    else throw IoError("unknown field header line: " + line);
  }
  if (dim == 0 || n_interior < 0 || comps == 0 || !(h > 0.0))
    throw IoError("incomplete field header in " + path);
  GridSpec g;
  g.dim = dim;
  g.n_interior = n_interior;
  g.h = h;
  g.side = side > 0.0 ? side : (n_interior + 1) * h;
  LoadedField out{Field(g, comps), time};
  const int N = n_interior;
  const int klo = 0, khi = (dim == 3) ? N + 1 : 0;
  for (int k = klo; k <= khi; ++k)
    for (int j = 0; j <= N + 1; ++j)
      is.read(reinterpret_cast<char*>(out.field.at(0, j, k)),
              static_cast<std::streamsize>(sizeof(double)) * (N + 2) * comps);
  if (!is) throw IoError("truncated field data in " + path);
  return out;
}

namespace {

std::ofstream open_csv(const std::string& path,
                       const std::vector<std::string>& config_echo) {
  std::ofstream os(path, std::ios::binary);  // binary: LF endings everywhere
  if (!os) throw IoError("cannot open for writing: " + path);
  for (const std::string& line : config_echo) os << "# " << line << "\n";
  return os;
}

}  // namespace

void write_energy_csv(const std::string& path,
                      const std::vector<EnergyRow>& rows,
                      const std::vector<std::string>& config_echo) {
  std::ofstream os = open_csv(path, config_echo);
  os << "step,time,energy,dissipation_residual,trace_drift,sym_drift,"
        "cg_iters,cg_residual\n";
  for (const EnergyRow& r : rows)
    os << r.step << ',' << format_double(r.time) << ','
       << format_double(r.energy) << ','
       << format_double(r.dissipation_residual) << ','
       << format_double(r.trace_drift) << ',' << format_double(r.sym_drift)
       << ',' << r.cg_iters << ',' << format_double(r.cg_residual) << "\n";
  if (!os) throw IoError("write failed: " + path);
}

void write_convergence_csv(const std::string& path,
                           const ConvergenceReport& report,
                           const std::vector<std::string>& config_echo) {
  std::ofstream os = open_csv(path, config_echo);
  os << "# " << report.reference_desc << "\n";
  os << "h_or_dt,err_Q11,order_Q11,err_Q12,order_Q12,err_r,order_r\n";
  for (const ConvergenceRow& r : report.rows)
    os << format_double(r.h_or_dt) << ',' << format_double(r.err_q11) << ','
       << format_double(r.ord_q11) << ',' << format_double(r.err_q12) << ','
       << format_double(r.ord_q12) << ',' << format_double(r.err_r) << ','
       << format_double(r.ord_r) << "\n";
  if (!os) throw IoError("write failed: " + path);
}

}  // namespace qgf
