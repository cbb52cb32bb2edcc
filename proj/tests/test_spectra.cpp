#include "catch_amalgamated.hpp"

#include <algorithm>
#include <cmath>

#include "pgeom/pcone.hpp"
#include "pgeom/spectra.hpp"
#include "pgeom/sym_matrix.hpp"

#include "support/helpers.hpp"

using namespace pgeom;
using Catch::Approx;

TEST_CASE("eigh on diagonal and symmetry-forced inputs") {
  SECTION("diag(3,1,2) sorts ascending with a permutation frame") {
    Spectrum s = eigh(SymMatrix::diagonal({3.0, 1.0, 2.0}));
    REQUIRE(s.eigenvalues[0] == Approx(1.0).margin(1e-12));
    REQUIRE(s.eigenvalues[1] == Approx(2.0).margin(1e-12));
    REQUIRE(s.eigenvalues[2] == Approx(3.0).margin(1e-12));
    // permutation of the identity: each eigenvector is +- a basis vector
    for (int k = 0; k < 3; ++k) {
      Vec v = s.eigenvector(k);
      int nonzero = 0;
      for (double c : v)
        if (std::abs(c) > 1e-10) ++nonzero;
      REQUIRE(nonzero == 1);
    }
  }
  SECTION("identity I4") {
    Spectrum s = eigh(SymMatrix::identity(4));
    for (double l : s.eigenvalues) REQUIRE(l == Approx(1.0).margin(1e-14));
  }
  SECTION("[[0,1],[1,0]] has eigenvalues -1, 1") {
    Spectrum s = eigh(SymMatrix::from_upper(2, {0.0, 1.0, 0.0}));
    REQUIRE(s.eigenvalues[0] == Approx(-1.0).margin(1e-12));
    REQUIRE(s.eigenvalues[1] == Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("Spectrum invariants on random matrices") {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 2 + static_cast<int>(rng.below(7));
    SymMatrix a = test::random_sym(n, rng);
    Spectrum s = eigh(a);
    for (int i = 0; i + 1 < n; ++i) REQUIRE(s.eigenvalues[i] <= s.eigenvalues[i + 1]);
    // orthonormal frame
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        REQUIRE(dot(s.eigenvector(i), s.eigenvector(j)) ==
                Approx(i == j ? 1.0 : 0.0).margin(1e-10));
    // reconstruction
    double scale = std::max(1.0, a.inf_norm());
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double rec = 0.0;
        for (int k = 0; k < n; ++k)
          rec += s.eigenvalues[k] * s.eigenvector(k)[i] * s.eigenvector(k)[j];
        REQUIRE(std::abs(rec - a(i, j)) <= 1e-8 * scale);
      }
  }
}

TEST_CASE("eigh determinism, including sign convention") {
  Rng rng(7);
  SymMatrix a = test::random_sym(5, rng);
  Spectrum s1 = eigh(a);
  Spectrum s2 = eigh(a);
  REQUIRE(s1.eigenvalues == s2.eigenvalues);
  REQUIRE(s1.frame == s2.frame);
  for (int k = 0; k < 5; ++k) {
    Vec v = s1.eigenvector(k);
    int imax = 0;
    for (int i = 1; i < 5; ++i)
      if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
    REQUIRE(v[imax] > 0.0);
  }
}

TEST_CASE("ordered_eigen_sum examples") {
  REQUIRE(ordered_eigen_sum(SymMatrix::diagonal({-1, 1, 1}), 2.0) == Approx(0.0).margin(1e-12));
  REQUIRE(ordered_eigen_sum(SymMatrix::diagonal({-1.5, 1, 1}), 2.5) == Approx(0.0).margin(1e-12));
  REQUIRE(ordered_eigen_sum(SymMatrix::diagonal({1, 2, 3}), 1.0) == Approx(1.0).margin(1e-12));
  SECTION("p = n uses the full trace") {
    SymMatrix a = SymMatrix::diagonal({-2, 5, 7});
    REQUIRE(ordered_eigen_sum(a, 3.0) == Approx(a.trace()).margin(1e-12));
  }
  SECTION("p beyond n is rejected") {
    REQUIRE_THROWS_AS(ordered_eigen_sum(SymMatrix::identity(3), 3.5), std::invalid_argument);
  }
}

TEST_CASE("ordered_eigen_sum is concave in A") {
  Rng rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 2 + static_cast<int>(rng.below(5));
    SymMatrix a = test::random_sym(n, rng);
    SymMatrix b = test::random_sym(n, rng);
    double t = rng.uniform();
    double p = 1.0 + rng.uniform() * (n - 1.0);
    SymMatrix mix = t * a + (1.0 - t) * b;
    double lhs = ordered_eigen_sum(mix, p);
    double rhs = t * ordered_eigen_sum(a, p) + (1.0 - t) * ordered_eigen_sum(b, p);
    REQUIRE(lhs >= rhs - 1e-8);
  }
}

TEST_CASE("ordered_eigen_sum is monotone under lowering an eigenvalue") {
  Rng rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    int n = 2 + static_cast<int>(rng.below(5));
    Vec d = rng.normal_vec(n);
    double p = 1.0 + rng.uniform() * (n - 1.0);
    double before = ordered_eigen_sum(SymMatrix::diagonal(d), p);
    int k = static_cast<int>(rng.below(n));
    d[k] -= rng.uniform(0.0, 2.0);
    double after = ordered_eigen_sum(SymMatrix::diagonal(d), p);
    REQUIRE(after <= before + 1e-12);
  }
}

TEST_CASE("trace_on_plane") {
  SECTION("coordinate plane") {
    SymMatrix a = SymMatrix::diagonal({1, 2, 3});
    PlaneFrame w(3, {unit_vector(3, 0), unit_vector(3, 1)});
    REQUIRE(trace_on_plane(a, w) == Approx(3.0).margin(1e-12));
  }
  SECTION("full space gives the trace") {
    Rng rng(3);
    SymMatrix a = test::random_sym(4, rng);
    std::vector<Vec> basis;
    for (int i = 0; i < 4; ++i) basis.push_back(unit_vector(4, i));
    REQUIRE(trace_on_plane(a, PlaneFrame(4, basis)) == Approx(a.trace()).margin(1e-12));
  }
  SECTION("tilted plane against the bilinear-form oracle") {
    SymMatrix a = SymMatrix::diagonal({-1, 1, 1});
    double s = 1.0 / std::sqrt(2.0);
    PlaneFrame w(3, {{s, s, 0.0}, {0.0, 0.0, 1.0}});
    REQUIRE(trace_on_plane(a, w) == Approx(1.0).margin(1e-12));
    // oracle: direct sum of quadratic forms
    double direct = a.quad(w.basis[0]) + a.quad(w.basis[1]);
    REQUIRE(trace_on_plane(a, w) == Approx(direct).margin(1e-14));
  }
  SECTION("basis independence for the same plane") {
    Rng rng(5);
    SymMatrix a = test::random_sym(5, rng);
    PlaneFrame w = random_plane(5, 2, rng);
    // rotate the basis inside the plane
    double c = std::cos(0.7), s = std::sin(0.7);
    Vec b0 = c * w.basis[0] + s * w.basis[1];
    Vec b1 = (-s) * w.basis[0] + c * w.basis[1];
    PlaneFrame w2(5, {b0, b1});
    REQUIRE(trace_on_plane(a, w) == Approx(trace_on_plane(a, w2)).margin(1e-10));
  }
  SECTION("non-orthonormal frame is rejected") {
    SymMatrix a = SymMatrix::identity(3);
    REQUIRE_THROWS_AS(trace_on_plane(a, PlaneFrame(3, {{1.0, 1.0, 0.0}})), std::invalid_argument);
  }
}

TEST_CASE("attainment: trace over the eigenplane of the p smallest equals the eigen-sum") {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    int n = 3 + static_cast<int>(rng.below(4));
    SymMatrix a = test::random_sym(n, rng);
    Spectrum sp = eigh(a);
    int p = 1 + static_cast<int>(rng.below(n));
    std::vector<Vec> basis;
    for (int k = 0; k < p; ++k) basis.push_back(sp.eigenvector(k));
    double t = trace_on_plane(a, PlaneFrame(n, basis));
    REQUIRE(t == Approx(ordered_eigen_sum(a, double(p))).margin(1e-8 * std::max(1.0, a.inf_norm())));
  }
}

TEST_CASE("projector") {
  SECTION("axis vector") {
    SymMatrix p = projector(unit_vector(3, 0));
    REQUIRE(p(0, 0) == Approx(1.0));
    REQUIRE(p(1, 1) == Approx(0.0).margin(1e-15));
    REQUIRE(p(2, 2) == Approx(0.0).margin(1e-15));
  }
  SECTION("diagonal direction") {
    SymMatrix p = projector({1.0, 1.0});
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) REQUIRE(p(i, j) == Approx(0.5).margin(1e-15));
  }
  SECTION("(3,4) is normalized") {
    SymMatrix p = projector({3.0, 4.0});
    REQUIRE(p(0, 0) == Approx(9.0 / 25.0));
    REQUIRE(p(0, 1) == Approx(12.0 / 25.0));
    REQUIRE(p(1, 1) == Approx(16.0 / 25.0));
  }
  SECTION("idempotent, trace one, spectrum (0,...,0,1)") {
    Rng rng(23);
    Vec e = rng.normal_vec(5);
    SymMatrix p = projector(e);
    REQUIRE(p.trace() == Approx(1.0).margin(1e-12));
    // idempotence via quadratic forms: P(Px) = Px
    Vec x = rng.normal_vec(5);
    Vec px = p.apply(x);
    Vec ppx = p.apply(px);
    REQUIRE(inf_norm(ppx - px) < 1e-12);
    auto lam = eigenvalues(p);
    for (int i = 0; i < 4; ++i) REQUIRE(lam[i] == Approx(0.0).margin(1e-12));
    REQUIRE(lam[4] == Approx(1.0).margin(1e-12));
  }
  SECTION("zero vector rejected") {
    REQUIRE_THROWS_AS(projector(Vec{0.0, 0.0}), std::invalid_argument);
  }
}

TEST_CASE("SymMatrix storage admits no asymmetric state and rejects junk") {
  SymMatrix a(3);
  a.set(0, 2, 4.5);
  REQUIRE(a(2, 0) == 4.5);
  REQUIRE_THROWS_AS(SymMatrix::from_upper(3, {1, 2, 3}), std::invalid_argument);
  REQUIRE_THROWS_AS(SymMatrix::from_upper(2, {1.0, std::nan(""), 2.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(SymMatrix(0), std::invalid_argument);
  REQUIRE_THROWS_AS(SymMatrix(17), std::invalid_argument);
}
