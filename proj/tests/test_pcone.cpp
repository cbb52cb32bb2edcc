#include "catch_amalgamated.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pgeom/pcone.hpp"
#include "pgeom/spectra.hpp"

#include "support/helpers.hpp"

using namespace pgeom;
using Catch::Approx;

TEST_CASE("is_p_positive examples") {
  SECTION("identity is interior with margin p") {
    for (double p : {1.0, 1.5, 2.0, 3.0, 4.0}) {
      auto v = is_p_positive(SymMatrix::identity(4), p);
      REQUIRE(v.status == ConeStatus::Interior);
      REQUIRE(v.margin == Approx(p).margin(1e-12));
    }
  }
  SECTION("diag(-1,1,1) at p=2 is boundary with margin 0") {
    auto v = is_p_positive(SymMatrix::diagonal({-1, 1, 1}), 2.0);
    REQUIRE(v.status == ConeStatus::Boundary);
    REQUIRE(v.margin == Approx(0.0).margin(1e-12));
  }
  SECTION("I - p P_e is boundary for p=3, n=4") {
    auto v = is_p_positive(SymMatrix::diagonal({-2, 1, 1, 1}), 3.0);
    REQUIRE(v.status == ConeStatus::Boundary);
  }
}

TEST_CASE("derivation_operator structure") {
  SECTION("diagonal input, subset sums on the lexicographic basis") {
    auto d = derivation_operator(SymMatrix::diagonal({2.0, 5.0, 11.0}), 2);
    REQUIRE(d.dim() == 3);
    REQUIRE(d.index_map()[0] == std::vector<int>{0, 1});
    REQUIRE(d.index_map()[1] == std::vector<int>{0, 2});
    REQUIRE(d.index_map()[2] == std::vector<int>{1, 2});
    REQUIRE(d.entry(0, 0) == Approx(7.0));
    REQUIRE(d.entry(1, 1) == Approx(13.0));
    REQUIRE(d.entry(2, 2) == Approx(16.0));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) REQUIRE(d.entry(i, j) == 0.0);
  }
  SECTION("single off-diagonal A12 = t couples e13 and e23 only") {
    double t = 0.37;
    SymMatrix a(3);
    a.set(0, 1, t);
    auto d = derivation_operator(a, 2);
    // hand expansion of the derivation rule: D_A e13 = t e23, D_A e23 = t e13
    REQUIRE(d.entry(1, 2) == Approx(t));
    REQUIRE(d.entry(2, 1) == Approx(t));
    REQUIRE(d.entry(0, 0) == 0.0);
    REQUIRE(d.entry(0, 1) == 0.0);
    REQUIRE(d.entry(0, 2) == 0.0);
    REQUIRE(d.entry(1, 1) == 0.0);
    REQUIRE(d.entry(2, 2) == 0.0);
  }
  SECTION("identity maps to p * Identity on Lambda^p") {
    for (int p = 1; p <= 4; ++p) {
      auto d = derivation_operator(SymMatrix::identity(4), p);
      for (int i = 0; i < d.dim(); ++i)
        for (int j = 0; j < d.dim(); ++j)
          REQUIRE(d.entry(i, j) == Approx(i == j ? double(p) : 0.0).margin(1e-15));
    }
  }
  SECTION("symmetry of the assembled matrix") {
    Rng rng(41);
    SymMatrix a = test::random_sym(5, rng);
    auto d = derivation_operator(a, 3);
    for (int i = 0; i < d.dim(); ++i)
      for (int j = 0; j < d.dim(); ++j) REQUIRE(d.entry(i, j) == d.entry(j, i));
  }
}

TEST_CASE("derivation_min_eig examples and cross-check") {
  REQUIRE(derivation_min_eig(SymMatrix::diagonal({-1, 1, 1}), 2) == Approx(0.0).margin(1e-12));
  SECTION("I - 3 P_e1 in R^4 at p = 3 has min eigenvalue 0") {
    SymMatrix a = SymMatrix::identity(4);
    a += (-3.0) * projector(unit_vector(4, 0));
    REQUIRE(derivation_min_eig(a, 3) == Approx(0.0).margin(1e-12));
  }
  SECTION("random cross-check against the eigenvalue-sum route") {
    Rng rng(43);
    for (int trial = 0; trial < 40; ++trial) {
      int n = 2 + static_cast<int>(rng.below(5));
      int p = 1 + static_cast<int>(rng.below(n));
      SymMatrix a = test::random_sym(n, rng);
      REQUIRE(derivation_min_eig(a, p) ==
              Approx(ordered_eigen_sum(a, double(p))).margin(1e-8 * std::max(1.0, a.inf_norm())));
    }
  }
}

TEST_CASE("full derivation spectrum equals the p-subset sums") {
  Rng rng(47);
  for (int trial = 0; trial < 25; ++trial) {
    int n = 2 + static_cast<int>(rng.below(5));
    int p = 1 + static_cast<int>(rng.below(n));
    SymMatrix a = test::random_sym(n, rng);
    auto lam = eigenvalues(a);
    auto d = derivation_operator(a, p);
    auto dspec = d.eigenvalues_ascending();
    std::vector<double> sums;
    for (const auto& I : d.index_map()) {
      double s = 0.0;
      for (int i : I) s += lam[i];
      sums.push_back(s);
    }
    std::sort(sums.begin(), sums.end());
    REQUIRE(dspec.size() == sums.size());
    double scale = std::max(1.0, a.inf_norm());
    for (std::size_t k = 0; k < sums.size(); ++k)
      REQUIRE(dspec[k] == Approx(sums[k]).margin(1e-8 * scale));
  }
}

TEST_CASE("plane trace equals the derivation form on the wedge of the frame") {
  // tr_W A = <D_A e_W, e_W> with e_W = w_1 ^ ... ^ w_p; the wedge
  // coordinates come from the independent minor-determinant oracle.
  Rng rng(53);
  for (int trial = 0; trial < 25; ++trial) {
    int n = 3 + static_cast<int>(rng.below(3));
    int p = 1 + static_cast<int>(rng.below(n));
    SymMatrix a = test::random_sym(n, rng);
    PlaneFrame w = random_plane(n, p, rng);
    auto d = derivation_operator(a, p);
    std::vector<double> ew;
    for (const auto& I : d.index_map()) ew.push_back(test::wedge_coordinate(w.basis, I));
    double quad = d.quad(ew);
    REQUIRE(quad == Approx(trace_on_plane(a, w)).margin(1e-8 * std::max(1.0, a.inf_norm())));
  }
}

TEST_CASE("three-way equivalence of the membership tests") {
  Rng rng(59);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 2 + static_cast<int>(rng.below(5));
    int p = 1 + static_cast<int>(rng.below(n));
    SymMatrix a = test::random_sym(n, rng);
    double scale = std::max(1.0, a.inf_norm());
    double sum = ordered_eigen_sum(a, double(p));
    double dmin = derivation_min_eig(a, p);
    REQUIRE(std::abs(sum - dmin) <= 1e-8 * scale);
    double gmin = grassmann_trace_min(a, p, 64, 1000 + trial);
    REQUIRE(gmin >= sum - 1e-10);
  }
}

TEST_CASE("grassmann_trace_min behavior") {
  SECTION("identity: every plane trace equals p") {
    for (int p = 1; p <= 3; ++p)
      REQUIRE(grassmann_trace_min(SymMatrix::identity(3), p, 100, 7) ==
              Approx(double(p)).margin(1e-12));
  }
  SECTION("diag(-1,1,1), p=2: values in [0,2], shrinking with more samples") {
    SymMatrix a = SymMatrix::diagonal({-1, 1, 1});
    double v100 = grassmann_trace_min(a, 2, 100, 99);
    double v10000 = grassmann_trace_min(a, 2, 10000, 99);
    REQUIRE(v100 >= -1e-10);
    REQUIRE(v100 <= 2.0);
    REQUIRE(v10000 <= v100 + 1e-12);
    REQUIRE(v10000 <= 0.05);  // approaches the exact infimum 0
  }
  SECTION("deterministic given the seed") {
    SymMatrix a = SymMatrix::diagonal({-1, 1, 1});
    REQUIRE(grassmann_trace_min(a, 2, 1, 12345) == grassmann_trace_min(a, 2, 1, 12345));
  }
}

TEST_CASE("nesting: membership propagates upward along a real p grid") {
  // once the verdict leaves "outside" it must stay that way for larger p
  Rng rng(61);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 2 + static_cast<int>(rng.below(5));
    SymMatrix a = test::random_sym(n, rng);
    bool member_seen = false;
    for (double p = 1.0; p <= n + 1e-9; p += 0.25) {
      bool in = is_p_positive(a, p).status != ConeStatus::Outside;
      if (member_seen) REQUIRE(in);
      member_seen = member_seen || in;
    }
  }
}

TEST_CASE("cone closure under addition and positive scaling") {
  Rng rng(67);
  int made = 0;
  while (made < 40) {
    int n = 2 + static_cast<int>(rng.below(4));
    double p = 1.0 + rng.uniform() * (n - 1.0);
    SymMatrix a = test::random_sym(n, rng);
    SymMatrix b = test::random_sym(n, rng);
    // shift both into the cone
    double sa = ordered_eigen_sum(a, p);
    double sb = ordered_eigen_sum(b, p);
    if (sa < 0.0) a += (-sa / p + 0.01) * SymMatrix::identity(n);
    if (sb < 0.0) b += (-sb / p + 0.01) * SymMatrix::identity(n);
    if (ordered_eigen_sum(a, p) < 0.0 || ordered_eigen_sum(b, p) < 0.0) continue;
    ++made;
    REQUIRE(ordered_eigen_sum(a + b, p) >= -1e-8);
    double c = rng.uniform(0.1, 5.0);
    REQUIRE(ordered_eigen_sum(c * a, p) ==
            Approx(c * ordered_eigen_sum(a, p)).margin(1e-9 * c * std::max(1.0, a.inf_norm())));
  }
}

TEST_CASE("endpoint identifications at p=1 and p=n") {
  Rng rng(71);
  for (int trial = 0; trial < 40; ++trial) {
    int n = 2 + static_cast<int>(rng.below(5));
    SymMatrix a = test::random_sym(n, rng);
    auto lam = eigenvalues(a);
    auto v1 = is_p_positive(a, 1.0);
    REQUIRE((v1.status != ConeStatus::Outside) == (lam.front() >= -v1.tol));
    auto vn = is_p_positive(a, double(n));
    REQUIRE((vn.status != ConeStatus::Outside) == (a.trace() >= -vn.tol));
  }
}

TEST_CASE("hodge_dual_form") {
  SECTION("diag(1,2,3) -> diag(5,4,3)") {
    SymMatrix d = hodge_dual_form(SymMatrix::diagonal({1, 2, 3}));
    REQUIRE(d(0, 0) == Approx(5.0));
    REQUIRE(d(1, 1) == Approx(4.0));
    REQUIRE(d(2, 2) == Approx(3.0));
  }
  SECTION("identity in R^n maps to (n-1) I") {
    SymMatrix d = hodge_dual_form(SymMatrix::identity(5));
    for (int i = 0; i < 5; ++i) REQUIRE(d(i, i) == Approx(4.0));
  }
  SECTION("lambda_min((trA)I - A) equals the (n-1) eigen-sum") {
    Rng rng(73);
    for (int trial = 0; trial < 40; ++trial) {
      int n = 2 + static_cast<int>(rng.below(5));
      SymMatrix a = test::random_sym(n, rng);
      double lmin = eigenvalues(hodge_dual_form(a)).front();
      REQUIRE(lmin == Approx(ordered_eigen_sum(a, double(n - 1)))
                          .margin(1e-8 * std::max(1.0, a.inf_norm())));
    }
  }
}

TEST_CASE("riesz_characteristic") {
  SECTION("P_3 membership in R^5 has characteristic 3") {
    auto member = [](const SymMatrix& a) {
      return is_p_positive(a, 3.0, 1e-9).status != ConeStatus::Outside;
    };
    REQUIRE(riesz_characteristic(member, 5, 1e-7) == Approx(3.0).margin(1e-6));
  }
  SECTION("the trace cone P_n has characteristic n") {
    for (int n : {3, 4}) {
      auto member = [n](const SymMatrix& a) { return a.trace() >= -1e-9 * n; };
      REQUIRE(riesz_characteristic(member, n, 1e-7) == Approx(double(n)).margin(1e-6));
    }
  }
  SECTION("positive semidefinite cone has characteristic 1") {
    auto member = [](const SymMatrix& a) { return eigenvalues(a).front() >= -1e-9; };
    REQUIRE(riesz_characteristic(member, 4, 1e-7) == Approx(1.0).margin(1e-6));
  }
  SECTION("never-failing membership reports the cap 2n") {
    auto member = [](const SymMatrix&) { return true; };
    REQUIRE(riesz_characteristic(member, 3, 1e-7) == Approx(6.0));
  }
  SECTION("failure at p=1 is a reported error") {
    auto member = [](const SymMatrix&) { return false; };
    REQUIRE_THROWS_WITH(riesz_characteristic(member, 3, 1e-7),
                        Catch::Matchers::ContainsSubstring("below 1"));
  }
  SECTION("non-monotone membership is rejected") {
    auto member = [](const SymMatrix& a) {
      double t = 1.0 - a(0, 0);  // recover the path parameter
      return t < 2.0 || t > 4.0;
    };
    REQUIRE_THROWS_AS(riesz_characteristic(member, 3, 1e-7), std::invalid_argument);
  }
}
