#include "qgf/operators.hpp"

#include <cmath>

#include "qgf/tensor.hpp"

namespace qgf {

namespace {
ReductionMode g_reduction_mode = ReductionMode::deterministic;

struct Loop {
  int N, dim, klo, khi;
  explicit Loop(const GridSpec& g)
      : N(g.n_interior), dim(g.dim), klo(0), khi(g.dim == 3 ? g.n_interior + 1 : 0) {}
};
}  // namespace

ReductionMode reduction_mode() { return g_reduction_mode; }
void set_reduction_mode(ReductionMode m) { g_reduction_mode = m; }

Field diff(const Field& f, int axis, DiffKind kind) {
  const GridSpec& g = f.grid();
  if (axis < 1 || axis > g.dim)
    throw ArgumentError("diff: axis outside 1..dim");
  Field out(g, f.comps());
  const long stride = (axis == 1) ? f.sx() : (axis == 2) ? f.sy() : f.sz();
  const int nc = f.comps();
  const Loop lp(g);
  const double inv_h = 1.0 / g.h;
  for (int k = lp.klo; k <= lp.khi; ++k)
    for (int j = 0; j <= lp.N + 1; ++j)
      for (int i = 0; i <= lp.N + 1; ++i) {
        const double* p = f.at(i, j, k);
        double* o = out.at(i, j, k);
        switch (kind) {
          case DiffKind::forward:
            for (int c = 0; c < nc; ++c) o[c] = (p[c + stride] - p[c]) * inv_h;
            break;
          case DiffKind::backward:
            for (int c = 0; c < nc; ++c) o[c] = (p[c] - p[c - stride]) * inv_h;
            break;
          case DiffKind::central:
            for (int c = 0; c < nc; ++c)
              o[c] = (p[c + stride] - p[c - stride]) * (0.5 * inv_h);
            break;
        }
      }
  return out;
}

Field laplacian_h(const Field& q) {
  const GridSpec& g = q.grid();
  Field out(g, q.comps());
  const int nc = q.comps();
  const long sx = q.sx(), sy = q.sy(), sz = q.sz();
  const int N = g.n_interior;
  const double inv_h2 = 1.0 / (g.h * g.h);
  const int klo = (g.dim == 3) ? 1 : 0;
  const int khi = (g.dim == 3) ? N : 0;
  for (int k = klo; k <= khi; ++k)
    for (int j = 1; j <= N; ++j) {
      const double* p = q.at(1, j, k);
      double* o = out.at(1, j, k);
      for (int i = 1; i <= N; ++i, p += nc, o += nc)
        for (int c = 0; c < nc; ++c) {
          double s = p[c + sx] + p[c - sx] + p[c + sy] + p[c - sy] -
                     2.0 * g.dim * p[c];
          if (g.dim == 3) s += p[c + sz] + p[c - sz];
          o[c] = s * inv_h2;
        }
    }
  return out;
}

// Row divergence u_s = sum_b Dc_b Q_sb over all real nodes, then
// alpha(Q)_ws = Dc_w u_s + Dc_s u_w - (2/d)(sum_b Dc_b u_b) delta_ws at
// interior nodes. The trace cancellation is exact: the diagonal sum
// reproduces the same floating-point value that is subtracted.
Field alpha_h_central(const Field& q) {
  const GridSpec& g = q.grid();
  const int d = g.dim;
  if (q.comps() != d * d)
    throw ArgumentError("alpha_h: tensor field expected");
  const int N = g.n_interior;
  const double inv_2h = 0.5 / g.h;
  const long strides[3] = {q.sx(), q.sy(), q.sz()};

  Field u = Field::vector(g);
  const long us[3] = {u.sx(), u.sy(), u.sz()};
  const Loop lp(g);
  for (int k = lp.klo; k <= lp.khi; ++k)
    for (int j = 0; j <= N + 1; ++j) {
      const double* p = q.at(0, j, k);
      double* up = u.at(0, j, k);
      for (int i = 0; i <= N + 1; ++i, p += d * d, up += d) {
        for (int s = 0; s < d; ++s) {
          double acc = 0.0;
          for (int b = 0; b < d; ++b) {
            const long st = strides[b];
            acc += (p[s * d + b + st] - p[s * d + b - st]) * inv_2h;
          }
          up[s] = acc;
        }
      }
    }

  Field out(g, d * d);
  const int klo = (d == 3) ? 1 : 0;
  const int khi = (d == 3) ? N : 0;
  const double tf = 2.0 / d;
  for (int k = klo; k <= khi; ++k)
    for (int j = 1; j <= N; ++j) {
      const double* up = u.at(1, j, k);
      double* o = out.at(1, j, k);
      for (int i = 1; i <= N; ++i, up += d, o += d * d) {
        double du[3][3];  // du[w][s] = Dc_w u_s
        for (int w = 0; w < d; ++w) {
          const long st = us[w];
          for (int s = 0; s < d; ++s)
            du[w][s] = (up[s + st] - up[s - st]) * inv_2h;
        }
        double p = 0.0;
        for (int b = 0; b < d; ++b) p += du[b][b];
        for (int w = 0; w < d; ++w)
          for (int s = 0; s < d; ++s)
            if (w != s) o[w * d + s] = du[w][s] + du[s][w];
        // Writing the last diagonal entry as minus the sum of the others
        // is the same formula up to rounding and makes tr(alpha) vanish
        // exactly node by node.
        double diag_sum = 0.0;
        for (int w = 0; w < d - 1; ++w) {
          double v = 2.0 * du[w][w] - tf * p;
          o[w * d + w] = v;
          diag_sum += v;
        }
        o[d * d - 1] = -diag_sum;
      }
    }
  return out;
}

Field alpha_h(const Field& q) {
  return (q.grid().dim == 2) ? laplacian_h(q) : alpha_h_central(q);
}

Field div_h(const Field& q) {
  const GridSpec& g = q.grid();
  const int d = g.dim;
  if (q.comps() != d * d)
    throw ArgumentError("div_h: tensor field expected");
  Field out = Field::vector(g);
  const double inv_2h = 0.5 / g.h;
  const long strides[3] = {q.sx(), q.sy(), q.sz()};
  const Loop lp(g);
  for (int k = lp.klo; k <= lp.khi; ++k)
    for (int j = 0; j <= lp.N + 1; ++j) {
      const double* p = q.at(0, j, k);
      double* o = out.at(0, j, k);
      for (int i = 0; i <= lp.N + 1; ++i, p += d * d, o += d) {
        for (int b = 0; b < d; ++b) {
          double acc = 0.0;
          for (int a = 0; a < d; ++a) {
            const long st = strides[a];
            acc += (p[a * d + b + st] - p[a * d + b - st]) * inv_2h;
          }
          o[b] = acc;
        }
      }
    }
  return out;
}

namespace {

// Reduce f(node values...) over all real nodes. The deterministic mode
// accumulates strictly in storage order; the blocked mode uses four
// interleaved accumulators.
template <typename RowFn>
double reduce_rows(const GridSpec& g, RowFn&& row) {
  const Loop lp(g);
  if (g_reduction_mode == ReductionMode::deterministic) {
    double acc = 0.0;
    for (int k = lp.klo; k <= lp.khi; ++k)
      for (int j = 0; j <= lp.N + 1; ++j) acc += row(j, k, 0);
    return acc;
  }
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  int t = 0;
  for (int k = lp.klo; k <= lp.khi; ++k)
    for (int j = 0; j <= lp.N + 1; ++j) acc[t++ & 3] += row(j, k, 0);
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

double hd(const GridSpec& g) { return std::pow(g.h, g.dim); }

}  // namespace

double inner_h(const Field& a, const Field& b) {
  if (!a.same_shape(b)) throw ArgumentError("inner_h: shape/grid mismatch");
  const int nc = a.comps();
  const int N = a.grid().n_interior;
  double s = reduce_rows(a.grid(), [&](int j, int k, int) {
    const double* pa = a.at(0, j, k);
    const double* pb = b.at(0, j, k);
    double acc = 0.0;
    const long len = static_cast<long>(N + 2) * nc;
    for (long t = 0; t < len; ++t) acc += pa[t] * pb[t];
    return acc;
  });
  return hd(a.grid()) * s;
}

double norm_h_sq(const Field& a) { return inner_h(a, a); }
double norm_h(const Field& a) { return std::sqrt(norm_h_sq(a)); }

double grad_norm_h_sq(const Field& a) {
  const GridSpec& g = a.grid();
  const int nc = a.comps();
  const int N = g.n_interior;
  const double inv_h2 = 1.0 / (g.h * g.h);
  const long strides[3] = {a.sx(), a.sy(), a.sz()};
  double s = reduce_rows(g, [&](int j, int k, int) {
    const double* p = a.at(0, j, k);
    double acc = 0.0;
    for (int i = 0; i <= N + 1; ++i, p += nc)
      for (int m = 0; m < g.dim; ++m) {
        const long st = strides[m];
        for (int c = 0; c < nc; ++c) {
          double dm = p[c] - p[c - st];
          acc += dm * dm;
        }
      }
    return acc * inv_h2;
  });
  return hd(g) * s;
}

double div_norm_h_sq(const Field& q) {
  const GridSpec& g = q.grid();
  const int d = g.dim;
  if (q.comps() != d * d)
    throw ArgumentError("div_norm_h_sq: tensor field expected");
  const double inv_2h = 0.5 / g.h;
  const long strides[3] = {q.sx(), q.sy(), q.sz()};
  const int N = g.n_interior;
  double s = reduce_rows(g, [&](int j, int k, int) {
    const double* p = q.at(0, j, k);
    double acc = 0.0;
    for (int i = 0; i <= N + 1; ++i, p += d * d)
      for (int b = 0; b < d; ++b) {
        double db = 0.0;
        for (int a = 0; a < d; ++a) {
          const long st = strides[a];
          db += (p[a * d + b + st] - p[a * d + b - st]) * inv_2h;
        }
        acc += db * db;
      }
    return acc;
  });
  return hd(g) * s;
}

StructureDrift structure_drift(const Field& q) {
  const GridSpec& g = q.grid();
  const int d = g.dim;
  if (q.comps() != d * d)
    throw ArgumentError("structure_drift: tensor field expected");
  const int N = g.n_interior;
  const int klo = (d == 3) ? 1 : 0;
  const int khi = (d == 3) ? N : 0;
  StructureDrift drift;
  for (int k = klo; k <= khi; ++k)
    for (int j = 1; j <= N; ++j) {
      const double* p = q.at(1, j, k);
      for (int i = 1; i <= N; ++i, p += d * d) {
        drift.trace = std::fmax(drift.trace, std::fabs(mat_trace(p, d)));
        drift.asym = std::fmax(drift.asym, mat_asym_max(p, d));
      }
    }
  return drift;
}

}  // namespace qgf
