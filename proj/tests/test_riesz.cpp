#include "catch_amalgamated.hpp"

#include <cmath>

#include "pgeom/pcone.hpp"
#include "pgeom/riesz.hpp"

#include "support/helpers.hpp"

using namespace pgeom;
using Catch::Approx;

TEST_CASE("riesz_value branches") {
  REQUIRE(riesz_value(RieszKernel(2.0, 3), {1.0, 0.0, 0.0}) == Approx(0.0).margin(1e-15));
  REQUIRE(riesz_value(RieszKernel(1.0, 2), {0.0, 3.0}) == Approx(3.0));
  REQUIRE(riesz_value(RieszKernel(3.0, 3), {0.0, 0.0, 2.0}) == Approx(-0.5));
  REQUIRE_THROWS_AS(riesz_value(RieszKernel(2.0, 2), Vec{0.0, 0.0}), std::domain_error);
}

TEST_CASE("riesz_gradient closed forms") {
  REQUIRE(inf_norm(riesz_gradient(RieszKernel(2.0, 2), {2.0, 0.0}) - Vec{0.5, 0.0}) < 1e-14);
  REQUIRE(inf_norm(riesz_gradient(RieszKernel(1.0, 2), {0.0, 1.0}) - Vec{0.0, 1.0}) < 1e-14);
  // differentiate -r^{-2} by hand: f' = 2 r^{-3}
  REQUIRE(inf_norm(riesz_gradient(RieszKernel(4.0, 4), {1.0, 0.0, 0.0, 0.0}) -
                   Vec{2.0, 0.0, 0.0, 0.0}) < 1e-14);
}

TEST_CASE("riesz_hessian matches the radial closed forms") {
  SECTION("p=2: (1/r^2)(I - 2 P_x)") {
    SymMatrix h = riesz_hessian(RieszKernel(2.0, 2), {1.0, 0.0});
    REQUIRE(h(0, 0) == Approx(-1.0));
    REQUIRE(h(1, 1) == Approx(1.0));
    REQUIRE(h(0, 1) == Approx(0.0).margin(1e-15));
  }
  SECTION("p=3 at (0,0,2): (1/8) diag(1,1,-2)") {
    SymMatrix h = riesz_hessian(RieszKernel(3.0, 3), {0.0, 0.0, 2.0});
    REQUIRE(h(0, 0) == Approx(1.0 / 8.0));
    REQUIRE(h(1, 1) == Approx(1.0 / 8.0));
    REQUIRE(h(2, 2) == Approx(-2.0 / 8.0));
  }
  SECTION("p=1 at (0,1): diag(1,0)") {
    SymMatrix h = riesz_hessian(RieszKernel(1.0, 2), {0.0, 1.0});
    REQUIRE(h(0, 0) == Approx(1.0));
    REQUIRE(h(1, 1) == Approx(0.0).margin(1e-15));
  }
}

TEST_CASE("gradient and hessian agree with finite differences of the value") {
  Rng rng(101);
  for (double p : {1.0, 1.5, 2.0, 2.5, 3.0, 4.0}) {
    RieszKernel k(p, 4);
    for (int trial = 0; trial < 30; ++trial) {
      Vec x = test::random_unit(4, rng);
      x = rng.uniform(0.5, 4.0) * x;
      double h = 1e-5 * std::max(1.0, inf_norm(x));
      Vec g = riesz_gradient(k, x);
      SymMatrix hess = riesz_hessian(k, x);
      for (int i = 0; i < 4; ++i) {
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        double fd = (riesz_value(k, xp) - riesz_value(k, xm)) / (2.0 * h);
        REQUIRE(g[i] == Approx(fd).margin(1e-6 * std::max(1.0, std::abs(fd))));
        for (int j = i; j < 4; ++j) {
          Vec a = x, b = x, c = x, d = x;
          a[i] += h; a[j] += h;
          b[i] += h; b[j] -= h;
          c[i] -= h; c[j] += h;
          d[i] -= h; d[j] -= h;
          double fd2 = (riesz_value(k, a) - riesz_value(k, b) - riesz_value(k, c) +
                        riesz_value(k, d)) /
                       (4.0 * h * h);
          REQUIRE(hess(i, j) == Approx(fd2).margin(1e-5 * std::max(1.0, std::abs(fd2))));
        }
      }
    }
  }
}

TEST_CASE("p_harmonic_defect") {
  SECTION("K_p is p-harmonic away from the pole") {
    Rng rng(103);
    for (double p : {1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0}) {
      RieszKernel k(p, 4);
      for (int trial = 0; trial < 20; ++trial) {
        Vec x = rng.uniform(0.5, 4.0) * test::random_unit(4, rng);
        REQUIRE(p_harmonic_defect(riesz_hessian(k, x), p) == Approx(0.0).margin(1e-10));
      }
    }
  }
  SECTION("checking a larger degree gives a positive defect") {
    RieszKernel k(2.0, 3);
    Vec x{1.0, 0.5, -0.25};
    REQUIRE(p_harmonic_defect(riesz_hessian(k, x), 3.0) > 1e-3);
  }
  SECTION("zero matrix has zero defect") {
    REQUIRE(p_harmonic_defect(SymMatrix(3), 2.0) == 0.0);
  }
}

TEST_CASE("Riesz kernels are p-plurisubharmonic and sharply so") {
  Rng rng(107);
  const int n = 4;
  for (double p : {1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0}) {
    RieszKernel k(p, n);
    for (int trial = 0; trial < 25; ++trial) {
      Vec x = rng.uniform(0.5, 4.0) * test::random_unit(n, rng);
      SymMatrix h = riesz_hessian(k, x);
      REQUIRE(is_p_positive(h, p).status != ConeStatus::Outside);
      for (double q = 1.0; q <= p - 0.25 + 1e-12; q += 0.25)
        REQUIRE(is_p_positive(h, q).status == ConeStatus::Outside);
    }
  }
}

TEST_CASE("scaling covariance of the power-branch hessian") {
  Rng rng(109);
  for (double p : {1.0, 1.5, 3.0, 4.0}) {
    RieszKernel k(p, 4);
    Vec x = test::random_unit(4, rng);
    double t = rng.uniform(0.5, 2.5);
    SymMatrix h1 = riesz_hessian(k, t * x);
    SymMatrix h0 = riesz_hessian(k, x);
    h0 *= std::pow(t, -p);
    REQUIRE((h1 - h0).inf_norm() < 1e-12 * std::max(1.0, h0.inf_norm()));
  }
}
