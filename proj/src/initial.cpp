#include "qgf/initial.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "qgf/tensor.hpp"

namespace qgf {

namespace {

// Gauss-Legendre nodes/weights on [-1/2, 1/2] with weights summing to 1.
struct Rule {
  std::vector<double> x, w;
};

Rule gauss_rule(int n) {
  Rule r;
  switch (n) {
    case 1:
      r.x = {0.0};
      r.w = {1.0};
      break;
    case 2: {
      double t = 0.5 / std::sqrt(3.0);
      r.x = {-t, t};
      r.w = {0.5, 0.5};
      break;
    }
    case 3: {
      double t = 0.5 * std::sqrt(3.0 / 5.0);
      r.x = {-t, 0.0, t};
      r.w = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
      break;
    }
    default: {
      // General Gauss-Legendre rule by Newton iteration on P_n; used by
      // tests for dense reference averages.
      if (n < 1) throw ArgumentError("project_initial: bad quadrature size");
      r.x.resize(n);
      r.w.resize(n);
      for (int i = 0; i < n; ++i) {
        double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
          double p0 = 1.0, p1 = x;
          for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
          }
          dp = n * (x * p1 - p0) / (x * x - 1.0);
          double dx = p1 / dp;
          x -= dx;
          if (std::fabs(dx) < 1e-15) break;
        }
        r.x[i] = 0.5 * x;
        r.w[i] = 1.0 / ((1.0 - x * x) * dp * dp);
      }
    }
  }
  return r;
}

}  // namespace

InitialData project_initial(const GridSpec& g, const ModelParams& p,
                            const MatrixFn& q0, int points_per_axis) {
  g.validate();
  p.validate();
  const int d = g.dim;
  if (p.dim != d)
    throw ArgumentError("project_initial: params dimension != grid dimension");
  InitialData out{Field::tensor(g), Field::scalar(g)};
  const Rule rule = gauss_rule(points_per_axis);
  const int nq = static_cast<int>(rule.x.size());
  const int N = g.n_interior;
  const double r0_boundary = std::sqrt(2.0 * p.A0);

  // r is defined on all real nodes; boundary nodes never evolve and keep
  // r(0).
  const int klo = 0, khi = (d == 3) ? N + 1 : 0;
  for (int k = klo; k <= khi; ++k)
    for (int j = 0; j <= N + 1; ++j)
      for (int i = 0; i <= N + 1; ++i) out.r.at(i, j, k)[0] = r0_boundary;

  double qv[9], acc[9];
  const int kin_lo = (d == 3) ? 1 : 0, kin_hi = (d == 3) ? N : 0;
  for (int k = kin_lo; k <= kin_hi; ++k)
    for (int j = 1; j <= N; ++j)
      for (int i = 1; i <= N; ++i) {
        for (int t = 0; t < d * d; ++t) acc[t] = 0.0;
        double racc = 0.0;
        const double xc = g.coord(i, 0), yc = g.coord(j, 1),
                     zc = (d == 3) ? g.coord(k, 2) : 0.0;
        for (int qz = 0; qz < ((d == 3) ? nq : 1); ++qz)
          for (int qy = 0; qy < nq; ++qy)
            for (int qx = 0; qx < nq; ++qx) {
              double x = xc + rule.x[qx] * g.h;
              double y = yc + rule.x[qy] * g.h;
              double z = (d == 3) ? zc + rule.x[qz] * g.h : 0.0;
              double w = rule.w[qx] * rule.w[qy] * ((d == 3) ? rule.w[qz] : 1.0);
              q0(x, y, z, qv);
              if (std::fabs(mat_trace(qv, d)) > 1e-12 ||
                  mat_asym_max(qv, d) > 1e-12) {
                std::ostringstream os;
                os << "project_initial: Q0 is not symmetric trace-free at ("
                   << x << "," << y;
                if (d == 3) os << "," << z;
                os << ")";
                throw ArgumentError(os.str());
              }
              for (int t = 0; t < d * d; ++t) acc[t] += w * qv[t];
              racc += w * r_of(qv, d, p);
            }
        double* qp = out.q.at(i, j, k);
        for (int t = 0; t < d * d; ++t) qp[t] = acc[t];
        out.r.at(i, j, k)[0] = racc;
      }
  return out;
}

}  // namespace qgf
