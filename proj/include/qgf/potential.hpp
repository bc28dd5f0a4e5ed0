// potential.hpp
// Pointwise algebra of the quadratized bulk potential:
//   F_B(Q) = (a/2) tr(Q^2) - (b/3) tr(Q^3) + (c/4) tr(Q^2)^2
//   r(Q)   = sqrt(2 (F_B(Q) + A0))
//   S(Q)   = a Q - b [Q^2 - (1/d) tr(Q^2) I] + c tr(Q^2) Q
//   P(Q)   = S(Q) / r(Q)
// plus the explicit second-order extrapolant (3/2) Q^n - (1/2) Q^{n-1}.

#pragma once

#include <string>

#include "qgf/field.hpp"

namespace qgf {

struct ModelParams {
  int dim = 2;
  double a = -0.3;
  double b = -4.0;
  double c = 4.0;
  double A0 = 500.0;
  double M = 1.0;
  double L1 = 1e-3;
  double L2 = 0.0;
  double L3 = 0.0;
  double dt = 1e-3;

  double l23_half() const { return 0.5 * (L2 + L3); }

  void validate() const {
    if (dim != 2 && dim != 3) throw ConfigError("params: dim must be 2 or 3");
    if (!(c > 0.0)) throw ConfigError("params: c must be positive");
    if (!(A0 > 0.0)) throw ConfigError("params: A0 must be positive");
    if (!(M > 0.0)) throw ConfigError("params: M must be positive");
    if (!(L1 > 0.0)) throw ConfigError("params: L1 must be positive");
    if (L2 + L3 < 0.0) throw ConfigError("params: L2+L3 must be >= 0");
    if (!(dt > 0.0)) throw ConfigError("params: dt must be positive");
  }
};

double bulk_energy(const double* q, int d, const ModelParams& p);

// Throws QuadratizationError when the radicand is not positive.
double r_of(const double* q, int d, const ModelParams& p);

void s_of(const double* q, int d, const ModelParams& p, double* out);
void p_of(const double* q, int d, const ModelParams& p, double* out);

// (3/2) qn - (1/2) qnm1
Field extrapolate(const Field& qn, const Field& qnm1);

// P applied nodewise to the extrapolant, over all real nodes. A
// quadratization failure is reported with the offending node location.
Field p_bar(const Field& qn, const Field& qnm1, const ModelParams& p);

}  // namespace qgf
