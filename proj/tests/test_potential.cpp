// Pointwise potential algebra: bulk energy, r, S, P, extrapolation.

#include <doctest.h>

#include <cmath>

#include "qgf/potential.hpp"
#include "qgf/random_fields.hpp"
#include "qgf/tensor.hpp"

using namespace qgf;

namespace {

double rel(double a, double b) {
  return std::fabs(a - b) / std::fmax(std::fmax(std::fabs(a), std::fabs(b)), 1e-30);
}

}  // namespace

TEST_CASE("bulk energy values") {
  ModelParams p;  // a=-0.3, b=-4, c=4
  SUBCASE("zero") {
    double q[4] = {0, 0, 0, 0};
    CHECK(bulk_energy(q, 2, p) == 0.0);
  }
  SUBCASE("2D diag(0.5,-0.5)") {
    double q[4] = {0.5, 0, 0, -0.5};
    // tr(Q^2)=0.5, tr(Q^3)=0: (-0.3/2)(0.5) + (4/4)(0.25) = 0.175
    CHECK(bulk_energy(q, 2, p) == doctest::Approx(0.175).epsilon(1e-14));
  }
  SUBCASE("3D diag(1,1,-2)") {
    double q[9] = {1, 0, 0, 0, 1, 0, 0, 0, -2};
    // tr(Q^2)=6, tr(Q^3)=-6: 3a + 2b + 9c
    double expect = 3.0 * p.a + 2.0 * p.b + 9.0 * p.c;
    CHECK(bulk_energy(q, 3, p) == doctest::Approx(expect).epsilon(1e-14));
    CHECK(expect == doctest::Approx(27.1).epsilon(1e-14));
  }
}

TEST_CASE("auxiliary variable r") {
  ModelParams p;
  SUBCASE("r(0) = sqrt(2 A0)") {
    double q[4] = {0, 0, 0, 0};
    CHECK(r_of(q, 2, p) == doctest::Approx(std::sqrt(1000.0)).epsilon(1e-15));
    CHECK(r_of(q, 2, p) == doctest::Approx(31.6227766016838).epsilon(1e-12));
  }
  SUBCASE("2D diag(0.5,-0.5)") {
    double q[4] = {0.5, 0, 0, -0.5};
    CHECK(r_of(q, 2, p) ==
          doctest::Approx(std::sqrt(1000.35)).epsilon(1e-15));
  }
  SUBCASE("r^2 - 2 A0 = 2 F_B on random inputs") {
    Rng rng(5);
    for (int dim : {2, 3}) {
      ModelParams pd;
      pd.dim = dim;
      for (int t = 0; t < 500; ++t) {
        double q[9];
        random_stf_matrix(dim, rng, 2.5, q);
        double r = r_of(q, dim, pd);
        CHECK(rel(r * r - 2.0 * pd.A0, 2.0 * bulk_energy(q, dim, pd)) <=
              1e-12);
      }
    }
  }
  SUBCASE("non-positive radicand is an error") {
    ModelParams bad;
    bad.a = -10.0;
    bad.c = 1.0;
    bad.A0 = 1.0;
    double q[4] = {1.0, 0, 0, -1.0};  // F_B = a + c = -9, radicand < 0
    CHECK_THROWS_AS(r_of(q, 2, bad), QuadratizationError);
  }
}

TEST_CASE("S(Q)") {
  ModelParams p;
  SUBCASE("zero") {
    double q[4] = {0, 0, 0, 0}, s[4];
    s_of(q, 2, p, s);
    for (double v : s) CHECK(v == 0.0);
  }
  SUBCASE("2D diag(0.5,-0.5): bracket cancels") {
    double q[4] = {0.5, 0, 0, -0.5}, s[4];
    s_of(q, 2, p, s);
    CHECK(s[0] == doctest::Approx(0.85).epsilon(1e-14));
    CHECK(s[3] == doctest::Approx(-0.85).epsilon(1e-14));
    CHECK(s[1] == 0.0);
    CHECK(s[2] == 0.0);
  }
  SUBCASE("symmetric trace-free in, symmetric trace-free out") {
    Rng rng(9);
    for (int dim : {2, 3}) {
      ModelParams pd;
      pd.dim = dim;
      for (int t = 0; t < 500; ++t) {
        double q[9], s[9];
        random_stf_matrix(dim, rng, 1.8, q);
        s_of(q, dim, pd, s);
        double scale = std::fmax(1.0, mat_frob(s, dim));
        CHECK(std::fabs(mat_trace(s, dim)) / scale <= 1e-13);
        CHECK(mat_asym_max(s, dim) / scale <= 1e-13);
      }
    }
  }
}

TEST_CASE("P(Q)") {
  ModelParams p;
  SUBCASE("zero") {
    double q[4] = {0, 0, 0, 0}, pq[4];
    p_of(q, 2, p, pq);
    for (double v : pq) CHECK(v == 0.0);
  }
  SUBCASE("2D diag value") {
    double q[4] = {0.5, 0, 0, -0.5}, pq[4];
    p_of(q, 2, p, pq);
    double expect = 0.85 / std::sqrt(1000.35);
    CHECK(pq[0] == doctest::Approx(expect).epsilon(1e-14));
    CHECK(pq[0] == doctest::Approx(0.026875).epsilon(1e-4));
    CHECK(pq[3] == doctest::Approx(-expect).epsilon(1e-14));
  }
  SUBCASE("matches the variational derivative of r") {
    Rng rng(13);
    for (int dim : {2, 3}) {
      ModelParams pd;
      pd.dim = dim;
      for (int t = 0; t < 100; ++t) {
        double q[9], e[9], pq[9], qp[9], qm[9];
        random_stf_matrix(dim, rng, 1.2, q);
        random_stf_matrix(dim, rng, 1.0, e);
        p_of(q, dim, pd, pq);
        const double eps = 1e-6;
        for (int c = 0; c < dim * dim; ++c) {
          qp[c] = q[c] + eps * e[c];
          qm[c] = q[c] - eps * e[c];
        }
        double fd = (r_of(qp, dim, pd) - r_of(qm, dim, pd)) / (2.0 * eps);
        CHECK(rel(fd, mat_dot(pq, e, dim)) <= 1e-6);
      }
    }
  }
  SUBCASE("empirical Lipschitz ratio stays bounded") {
    Rng rng(17);
    ModelParams pd;
    pd.dim = 3;
    std::uniform_real_distribution<double> uq(0.0, 20.0), ud(1e-4, 10.0);
    double worst = 0.0;
    for (int t = 0; t < 5000; ++t) {
      double q[9], dq[9], q2[9], p1[9], p2[9];
      random_stf_matrix(3, rng, uq(rng), q);
      double dn = ud(rng);
      random_stf_matrix(3, rng, dn, dq);
      for (int c = 0; c < 9; ++c) q2[c] = q[c] + dq[c];
      p_of(q, 3, pd, p1);
      p_of(q2, 3, pd, p2);
      double num = 0.0;
      for (int c = 0; c < 9; ++c) num += (p2[c] - p1[c]) * (p2[c] - p1[c]);
      worst = std::fmax(worst, std::sqrt(num) / dn);
    }
    CHECK(std::isfinite(worst));
    CHECK(worst < 10.0);
  }
}

TEST_CASE("r bounds for large |Q|") {
  // (sqrt(c)/2)|Q|_F^2 <= r(Q) <= sqrt(c)|Q|_F^2 once |Q|_F >= 10.
  Rng rng(19);
  std::uniform_real_distribution<double> unorm(10.0, 60.0);
  for (int dim : {2, 3}) {
    ModelParams p;
    p.dim = dim;
    for (int t = 0; t < 2000; ++t) {
      double q[9];
      random_stf_matrix(dim, rng, unorm(rng), q);
      double f2 = mat_frob2(q, dim);
      double r = r_of(q, dim, p);
      CHECK(r >= 0.5 * std::sqrt(p.c) * f2);
      CHECK(r <= std::sqrt(p.c) * f2);
    }
  }
}

TEST_CASE("extrapolation") {
  GridSpec g = GridSpec::cube(2, 8, 1.0);
  Rng rng(23);
  Field a = random_stf_dirichlet(g, rng);
  SUBCASE("identical levels") {
    Field e = extrapolate(a, a);
    for (size_t t = 0; t < e.data().size(); ++t)
      CHECK(e.data()[t] == doctest::Approx(a.data()[t]).epsilon(1e-15));
  }
  SUBCASE("2A and A give 2.5A") {
    Field two(g, 4);
    field_lincomb(2.0, a, 0.0, a, two);
    Field e = extrapolate(two, a);
    for (size_t t = 0; t < e.data().size(); ++t)
      CHECK(e.data()[t] ==
            doctest::Approx(2.5 * a.data()[t]).epsilon(1e-14));
  }
  SUBCASE("p_bar of zero fields is zero") {
    ModelParams p;
    Field z = Field::tensor(g);
    Field pb = p_bar(z, z, p);
    for (double v : pb.data()) CHECK(v == 0.0);
  }
}

TEST_CASE("parameter validation") {
  ModelParams p;
  p.c = -1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = ModelParams{};
  p.A0 = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = ModelParams{};
  p.L1 = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = ModelParams{};
  p.L2 = -1.0;
  p.L3 = 0.5;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = ModelParams{};
  p.dt = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}
