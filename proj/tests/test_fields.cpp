// Grid, field storage, difference operators, norms, projections.

#include <doctest.h>

#include <cmath>

#include "qgf/experiments.hpp"
#include "qgf/initial.hpp"
#include "qgf/operators.hpp"
#include "qgf/random_fields.hpp"
#include "qgf/tensor.hpp"

using namespace qgf;

namespace {

double rel(double a, double b) {
  return std::fabs(a - b) / std::fmax(std::fmax(std::fabs(a), std::fabs(b)), 1e-30);
}

}  // namespace

TEST_CASE("grid geometry") {
  GridSpec g = GridSpec::cube(2, 10, 2.0);
  CHECK(g.n_interior == 9);
  CHECK(g.h == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(g.nodes() == 11);
  CHECK(g.coord(0, 0) == 0.0);
  CHECK(g.coord(10, 0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(GridSpec::cube(4, 10), ArgumentError);
  CHECK_THROWS_AS(GridSpec::cube(2, 1), ArgumentError);
}

TEST_CASE("central difference on a 1D slice") {
  // f = (0,1,2,3,0) on nodes 0..4, h = 0.25.
  GridSpec g = GridSpec::cube(2, 4, 1.0);
  Field f = Field::scalar(g);
  const double vals[5] = {0, 1, 2, 3, 0};
  for (int j = 0; j <= 4; ++j)
    for (int i = 0; i <= 4; ++i) f.at(i, j)[0] = vals[i];
  Field d = diff(f, 1, DiffKind::central);
  CHECK(d.at(2, 2)[0] == doctest::Approx(4.0).epsilon(1e-14));
  CHECK_THROWS_AS(diff(f, 3, DiffKind::central), ArgumentError);
  CHECK_THROWS_AS(diff(f, 0, DiffKind::central), ArgumentError);
}

TEST_CASE("forward difference of constant interior") {
  GridSpec g = GridSpec::cube(2, 8, 1.0);
  Field f = Field::scalar(g);
  const int N = g.n_interior;
  for (int j = 1; j <= N; ++j)
    for (int i = 1; i <= N; ++i) f.at(i, j)[0] = 3.5;
  Field d = diff(f, 1, DiffKind::forward);
  for (int j = 2; j < N; ++j)
    for (int i = 2; i < N; ++i) CHECK(d.at(i, j)[0] == 0.0);
}

TEST_CASE("second difference exact on quadratics") {
  GridSpec g = GridSpec::cube(2, 10, 1.0);
  Field f = Field::scalar(g);
  const int N = g.n_interior;
  for (int j = -1; j <= N + 2; ++j)
    for (int i = -1; i <= N + 2; ++i) {
      double x = g.coord(i, 0);
      f.at(i, j)[0] = x * x;
    }
  Field d2 = diff(diff(f, 1, DiffKind::backward), 1, DiffKind::forward);
  for (int j = 1; j <= N; ++j)
    for (int i = 1; i <= N; ++i)
      CHECK(d2.at(i, j)[0] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("laplacian basics") {
  GridSpec g = GridSpec::cube(2, 12, 1.0);
  SUBCASE("zero maps to zero") {
    Field q = Field::tensor(g);
    Field lap = laplacian_h(q);
    for (double v : lap.data()) CHECK(v == 0.0);
  }
  SUBCASE("quadratic component gives -2") {
    Field q = Field::tensor(g);
    const int N = g.n_interior;
    for (int j = 0; j <= N + 1; ++j)
      for (int i = 0; i <= N + 1; ++i) {
        double x = g.coord(i, 0);
        q.at(i, j)[0] = x * (1.0 - x);
      }
    Field lap = laplacian_h(q);
    for (int j = 1; j <= N; ++j)
      for (int i = 1; i <= N; ++i)
        CHECK(lap.at(i, j)[0] == doctest::Approx(-2.0).epsilon(1e-11));
  }
  SUBCASE("<Q, lap Q> = -||grad Q||^2 on random fields") {
    Rng rng(7);
    for (int t = 0; t < 10; ++t) {
      Field q = random_tensor_dirichlet(g, rng);
      double lhs = inner_h(q, laplacian_h(q));
      CHECK(rel(lhs, -grad_norm_h_sq(q)) <= 1e-13);
    }
  }
}

TEST_CASE("alpha operator structure") {
  for (int dim : {2, 3}) {
    GridSpec g = GridSpec::cube(dim, dim == 2 ? 12 : 7, 1.0);
    Rng rng(11 + dim);
    SUBCASE((dim == 2 ? "2d" : "3d")) {
      Field zero = Field::tensor(g);
      Field az = alpha_h(zero);
      for (double v : az.data()) CHECK(v == 0.0);

      // Trace-free output for arbitrary input, exactly.
      Field x = random_tensor_dirichlet(g, rng);
      Field ax = alpha_h_central(x);
      const int N = g.n_interior;
      const int klo = (dim == 3) ? 1 : 0, khi = (dim == 3) ? N : 0;
      double worst_tr = 0.0;
      for (int k = klo; k <= khi; ++k)
        for (int j = 1; j <= N; ++j)
          for (int i = 1; i <= N; ++i)
            worst_tr = std::fmax(worst_tr,
                                 std::fabs(mat_trace(ax.at(i, j, k), dim)));
      CHECK(worst_tr <= 1e-14);

      // Symmetric input -> symmetric output.
      Field s = random_stf_dirichlet(g, rng);
      CHECK(structure_drift(alpha_h_central(s)).asym <= 1e-13);
    }
  }
}

TEST_CASE("alpha_h dispatches to the laplacian in 2D") {
  GridSpec g = GridSpec::cube(2, 9, 1.0);
  Rng rng(3);
  Field q = random_stf_dirichlet(g, rng);
  Field a = alpha_h(q);
  Field l = laplacian_h(q);
  for (size_t t = 0; t < a.data().size(); ++t)
    CHECK(a.data()[t] == l.data()[t]);
}

TEST_CASE("alpha adjointness (divergence pairing)") {
  for (int dim : {2, 3}) {
    GridSpec g = GridSpec::cube(dim, dim == 2 ? 14 : 8, 1.0);
    Rng rng(23 + dim);
    for (int t = 0; t < 10; ++t) {
      Field a = random_stf_dirichlet(g, rng);
      Field b = random_stf_dirichlet(g, rng);
      double lhs = inner_h(a, alpha_h_central(b));
      double rhs = -2.0 * inner_h(div_h(a), div_h(b));
      CHECK(rel(lhs, rhs) <= 1e-12);
    }
  }
}

namespace {

// Independent naive divergence used as the oracle: literal loops over the
// definition, no stride tricks.
Field naive_div(const Field& q) {
  const GridSpec& g = q.grid();
  const int d = g.dim;
  Field out = Field::vector(g);
  const int N = g.n_interior;
  const int klo = 0, khi = (d == 3) ? N + 1 : 0;
  for (int k = klo; k <= khi; ++k)
    for (int j = 0; j <= N + 1; ++j)
      for (int i = 0; i <= N + 1; ++i)
        for (int b = 0; b < d; ++b) {
          double s = 0.0;
          for (int a = 0; a < d; ++a) {
            int ip = i + (a == 0), im = i - (a == 0);
            int jp = j + (a == 1), jm = j - (a == 1);
            int kp = k + (a == 2), km = k - (a == 2);
            s += (q.at(ip, jp, kp)[a * d + b] - q.at(im, jm, km)[a * d + b]) /
                 (2.0 * g.h);
          }
          out.at(i, j, k)[b] = s;
        }
  return out;
}

}  // namespace

TEST_CASE("divergence") {
  SUBCASE("zero field") {
    GridSpec g = GridSpec::cube(2, 8, 1.0);
    Field q = Field::tensor(g);
    Field dv = div_h(q);
    for (double v : dv.data()) CHECK(v == 0.0);
  }
  SUBCASE("linear component") {
    GridSpec g = GridSpec::cube(2, 10, 1.0);
    Field q = Field::tensor(g);
    const int N = g.n_interior;
    for (int j = 1; j <= N; ++j)
      for (int i = 1; i <= N; ++i) q.at(i, j)[0] = g.coord(i, 0);
    Field dv = div_h(q);
    for (int j = 2; j < N; ++j)
      for (int i = 2; i < N; ++i)
        CHECK(dv.at(i, j)[0] == doctest::Approx(1.0).epsilon(1e-13));
  }
  SUBCASE("matches the naive loop oracle") {
    for (int dim : {2, 3}) {
      GridSpec g = GridSpec::cube(dim, dim == 2 ? 11 : 7, 1.0);
      Rng rng(31 + dim);
      Field q = random_tensor_dirichlet(g, rng);
      Field fast = div_h(q);
      Field slow = naive_div(q);
      for (size_t t = 0; t < fast.data().size(); ++t)
        CHECK(fast.data()[t] == doctest::Approx(slow.data()[t]).epsilon(1e-14));
    }
  }
}

TEST_CASE("inner products and norms") {
  GridSpec g = GridSpec::cube(2, 10, 1.0);
  SUBCASE("zero") {
    Field a = Field::tensor(g);
    CHECK(norm_h(a) == 0.0);
  }
  SUBCASE("single unit-norm node") {
    Field a = Field::tensor(g);
    double* p = a.at(4, 5);
    p[0] = 0.6;
    p[1] = 0.8;  // |A|_F = 1
    CHECK(norm_h_sq(a) == doctest::Approx(g.h * g.h).epsilon(1e-14));
  }
  SUBCASE("cauchy-schwarz") {
    Rng rng(41);
    for (int t = 0; t < 20; ++t) {
      Field a = random_tensor_dirichlet(g, rng);
      Field b = random_tensor_dirichlet(g, rng);
      CHECK(std::fabs(inner_h(a, b)) <=
            norm_h(a) * norm_h(b) * (1.0 + 1e-14));
    }
  }
  SUBCASE("grid mismatch throws") {
    Field a = Field::tensor(g);
    Field b = Field::tensor(GridSpec::cube(2, 12, 1.0));
    CHECK_THROWS_AS(inner_h(a, b), ArgumentError);
  }
}

TEST_CASE("summation by parts identities") {
  for (int dim : {2, 3}) {
    GridSpec g = GridSpec::cube(dim, dim == 2 ? 16 : 8, 1.0);
    Rng rng(47 + dim);
    for (int t = 0; t < 25; ++t) {
      Field a = random_scalar_dirichlet(g, rng);
      Field b = random_scalar_everywhere(g, rng);
      for (int axis = 1; axis <= dim; ++axis) {
        double l1 = inner_h(a, diff(b, axis, DiffKind::forward));
        double r1 = -inner_h(b, diff(a, axis, DiffKind::backward));
        CHECK(rel(l1, r1) <= 1e-12);
        double l2 = inner_h(a, diff(b, axis, DiffKind::backward));
        double r2 = -inner_h(b, diff(a, axis, DiffKind::forward));
        CHECK(rel(l2, r2) <= 1e-12);
        double l3 = inner_h(a, diff(b, axis, DiffKind::central));
        double r3 = -inner_h(b, diff(a, axis, DiffKind::central));
        CHECK(rel(l3, r3) <= 1e-12);
      }
    }
  }
}

TEST_CASE("operator linearity") {
  GridSpec g = GridSpec::cube(2, 10, 1.0);
  Rng rng(53);
  Field a = random_tensor_dirichlet(g, rng);
  Field b = random_tensor_dirichlet(g, rng);
  Field combo(g, 4);
  field_lincomb(1.0, a, -2.25, b, combo);
  Field lhs = laplacian_h(combo);
  Field la = laplacian_h(a);
  Field lb = laplacian_h(b);
  Field rhs(g, 4);
  field_lincomb(1.0, la, -2.25, lb, rhs);
  Field d(g, 4);
  field_lincomb(1.0, lhs, -1.0, rhs, d);
  CHECK(norm_h(d) <= 1e-13 * std::fmax(norm_h(lhs), 1.0));
}

TEST_CASE("initial projection") {
  ModelParams p;
  SUBCASE("zero data") {
    GridSpec g = GridSpec::cube(2, 8, 1.0);
    InitialData init = project_initial(
        g, p, [](double, double, double, double* out) {
          for (int t = 0; t < 4; ++t) out[t] = 0.0;
        });
    for (double v : init.q.data()) CHECK(v == 0.0);
    const double r0 = std::sqrt(2.0 * p.A0);
    const int N = g.n_interior;
    for (int j = 0; j <= N + 1; ++j)
      for (int i = 0; i <= N + 1; ++i)
        CHECK(init.r.at(i, j)[0] == doctest::Approx(r0).epsilon(1e-14));
  }
  SUBCASE("constant data averages to itself") {
    GridSpec g = GridSpec::cube(2, 8, 1.0);
    InitialData init = project_initial(
        g, p, [](double, double, double, double* out) {
          out[0] = 0.3;
          out[1] = -0.1;
          out[2] = -0.1;
          out[3] = -0.3;
        });
    CHECK(init.q.at(4, 4)[0] == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(init.q.at(2, 7)[1] == doctest::Approx(-0.1).epsilon(1e-14));
  }
  SUBCASE("3-point Gauss vs dense cell averages") {
    GridSpec g = GridSpec::cube(2, 10, 2.0);
    MatrixFn f = initial_condition_fn(InitialCondition::example1);
    InitialData gauss = project_initial(g, p, f, 3);
    InitialData dense = project_initial(g, p, f, 10);
    double worst = 0.0;
    const int N = g.n_interior;
    for (int j = 1; j <= N; ++j)
      for (int i = 1; i <= N; ++i) {
        for (int c = 0; c < 4; ++c)
          worst = std::fmax(
              worst, std::fabs(gauss.q.at(i, j)[c] - dense.q.at(i, j)[c]));
        worst = std::fmax(
            worst, std::fabs(gauss.r.at(i, j)[0] - dense.r.at(i, j)[0]));
      }
    CHECK(worst <= 1e-10);
  }
  SUBCASE("rejects non-trace-free data") {
    GridSpec g = GridSpec::cube(2, 6, 1.0);
    CHECK_THROWS_AS(project_initial(g, p,
                                    [](double, double, double, double* out) {
                                      out[0] = 1.0;
                                      out[1] = out[2] = 0.0;
                                      out[3] = 1.0;
                                    }),
                    ArgumentError);
  }
  SUBCASE("rejects asymmetric data") {
    GridSpec g = GridSpec::cube(2, 6, 1.0);
    CHECK_THROWS_AS(project_initial(g, p,
                                    [](double, double, double, double* out) {
                                      out[0] = 0.5;
                                      out[1] = 0.2;
                                      out[2] = -0.2;
                                      out[3] = -0.5;
                                    }),
                    ArgumentError);
  }
}

TEST_CASE("structure drift reports injected corruption") {
  GridSpec g = GridSpec::cube(2, 8, 1.0);
  Field q = Field::tensor(g);
  q.at(3, 3)[0] = 1.0;
  q.at(3, 3)[3] = -1.0 + 3e-7;  // trace 3e-7
  q.at(5, 5)[1] = 0.25;
  q.at(5, 5)[2] = 0.25 - 1e-6;  // asym 1e-6
  StructureDrift d = structure_drift(q);
  CHECK(d.trace == doctest::Approx(3e-7).epsilon(1e-9));
  CHECK(d.asym == doctest::Approx(1e-6).epsilon(1e-9));
}
