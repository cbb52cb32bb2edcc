#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pgeom/core.hpp"
#include "pgeom/spectra.hpp"
#include "pgeom/sym_matrix.hpp"

namespace pgeom {

enum class ConeStatus { Interior, Boundary, Outside };

inline const char* to_string(ConeStatus s) {
  switch (s) {
    case ConeStatus::Interior: return "interior";
    case ConeStatus::Boundary: return "boundary";
    default: return "outside";
  }
}

/// Cone membership verdict: margin is the (fractionally weighted) sum of the
/// p smallest eigenvalues, tol the effective absolute tolerance used.
struct ConeVerdict {
  ConeStatus status;
  double margin;
  double tol;
};

inline ConeVerdict classify_margin(double margin, double tol) {
  if (margin > tol) return {ConeStatus::Interior, margin, tol};
  if (margin < -tol) return {ConeStatus::Outside, margin, tol};
  return {ConeStatus::Boundary, margin, tol};
}

/// Default boundary tolerance, applied relative to max(1, ||A||_inf).
inline constexpr double kConeTol = 1e-8;

/// Membership of A in the cone P_p: margin = ordered_eigen_sum(A, p).
inline ConeVerdict is_p_positive(const SymMatrix& a, const PDegree& p, double tol = kConeTol) {
  if (!(tol > 0.0)) throw std::invalid_argument("is_p_positive: tol must be > 0");
  double margin = ordered_eigen_sum(a, p);
  double tol_eff = tol * std::max(1.0, a.inf_norm());
  return classify_margin(margin, tol_eff);
}

inline ConeVerdict is_p_positive(const SymMatrix& a, double p, double tol = kConeTol) {
  return is_p_positive(a, PDegree(p), tol);
}

/// The action of A as a derivation on Lambda^p R^n, expressed in the
/// lexicographic basis e_I = e_{i1} ^ ... ^ e_{ip}. Entry rules:
///   (I, I)  ->  sum_{i in I} A_ii
///   (I, J)  ->  sign * A_ij           when J = (I \ {i}) u {j}
///   (I, J)  ->  0                     when |I symm-diff J| > 2
/// The sign is the parity of re-sorting (I \ {i}) u {j}, i.e. (-1)^m with m
/// the number of elements of I \ {i} strictly between i and j.
class DerivationMatrix {
 public:
  DerivationMatrix(int n, int p, std::vector<std::vector<int>> index_map,
                   std::vector<double> entries)
      : n_(n), p_(p), dim_(static_cast<int>(index_map.size())),
        index_map_(std::move(index_map)), entries_(std::move(entries)) {}

  int n() const { return n_; }
  int p() const { return p_; }
  int dim() const { return dim_; }
  const std::vector<std::vector<int>>& index_map() const { return index_map_; }

  double entry(int i, int j) const { return entries_[static_cast<std::size_t>(i) * dim_ + j]; }
  const std::vector<double>& dense() const { return entries_; }

  std::vector<double> eigenvalues_ascending() const {
    return detail::jacobi_eigh(entries_, dim_, false).eigenvalues;
  }

  double min_eigenvalue() const { return eigenvalues_ascending().front(); }

  /// Quadratic form <D_A x, x> on Lambda^p coordinates.
  double quad(const std::vector<double>& x) const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) s += entry(i, j) * x[i] * x[j];
    return s;
  }

 private:
  int n_, p_, dim_;
  std::vector<std::vector<int>> index_map_;
  std::vector<double> entries_;
};

namespace detail {

inline std::vector<std::vector<int>> p_subsets_lex(int n, int p) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(p);
  for (int i = 0; i < p; ++i) cur[i] = i;
  while (true) {
    out.push_back(cur);
    int i = p - 1;
    while (i >= 0 && cur[i] == n - p + i) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < p; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

inline std::uint32_t subset_mask(const std::vector<int>& s) {
  std::uint32_t m = 0;
  for (int i : s) m |= (1u << i);
  return m;
}

}  // namespace detail

inline DerivationMatrix derivation_operator(const SymMatrix& a, int p) {
  const int n = a.n();
  if (p < 1 || p > n) throw std::invalid_argument("derivation_operator: need 1 <= p <= n");
  auto subsets = detail::p_subsets_lex(n, p);
  const int dim = static_cast<int>(subsets.size());

  std::vector<int> rank_of_mask(1u << n, -1);
  for (int r = 0; r < dim; ++r) rank_of_mask[detail::subset_mask(subsets[r])] = r;

  std::vector<double> entries(static_cast<std::size_t>(dim) * dim, 0.0);
  for (int r = 0; r < dim; ++r) {
    const auto& I = subsets[r];
    const std::uint32_t mI = detail::subset_mask(I);
    double diag = 0.0;
    for (int i : I) diag += a(i, i);
    entries[static_cast<std::size_t>(r) * dim + r] = diag;

    for (int i : I) {
      for (int j = 0; j < n; ++j) {
        if (mI & (1u << j)) continue;
        std::uint32_t mJ = (mI & ~(1u << i)) | (1u << j);
        int rj = rank_of_mask[mJ];
        int lo = std::min(i, j), hi = std::max(i, j);
        int between = 0;
        for (int k : I)
          if (k != i && k > lo && k < hi) ++between;
        double sign = (between % 2 == 0) ? 1.0 : -1.0;
        entries[static_cast<std::size_t>(r) * dim + rj] = sign * a(i, j);
      }
    }
  }
  return DerivationMatrix(n, p, std::move(subsets), std::move(entries));
}

/// Smallest eigenvalue of D_A; equals ordered_eigen_sum(A, p) by attainment.
inline double derivation_min_eig(const SymMatrix& a, int p) {
  return derivation_operator(a, p).min_eigenvalue();
}

/// Draw a Haar-distributed orthonormal p-frame in R^n (Gaussian + MGS).
inline PlaneFrame random_plane(int n, int p, Rng& rng) {
  std::vector<Vec> cols(p);
  while (true) {
    for (int c = 0; c < p; ++c) cols[c] = rng.normal_vec(n);
    if (orthonormalize(cols)) break;
  }
  return PlaneFrame(n, cols);
}

/// Minimum of trace_on_plane over `samples` Haar-random p-planes. This is a
/// diagnostic upper bound on the infimum (= ordered_eigen_sum), never an
/// authoritative membership test. The loop reuses its frame buffers; at
/// desk-scale sample counts (10^4 and up) allocation would dominate.
inline double grassmann_trace_min(const SymMatrix& a, int p, int samples, std::uint64_t seed) {
  const int n = a.n();
  if (p < 1 || p > n) throw std::invalid_argument("grassmann_trace_min: need 1 <= p <= n");
  if (samples < 1) throw std::invalid_argument("grassmann_trace_min: need samples >= 1");
  Rng rng(seed);
  std::vector<Vec> cols(p, Vec(n));
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    do {
      for (Vec& c : cols)
        for (double& v : c) v = rng.normal();
    } while (!orthonormalize(cols));
    double t = 0.0;
    for (const Vec& c : cols) t += a.quad(c);
    best = std::min(best, t);
  }
  return best;
}

/// Hodge-star form of D_A at p = n-1: (tr A) I - A.
inline SymMatrix hodge_dual_form(const SymMatrix& a) {
  SymMatrix b = (-1.0) * a;
  double t = a.trace();
  for (int i = 0; i < a.n(); ++i) b.add(i, i, t);
  return b;
}

/// The test path t -> I - t P_{e1} as a diagonal matrix.
inline SymMatrix riesz_test_matrix(int n, double t) {
  SymMatrix a = SymMatrix::identity(n);
  a.set(0, 0, 1.0 - t);
  return a;
}

/// Riesz characteristic of a membership predicate: sup{ p in [1, 2n] :
/// member(I - p P_e) }, found by bisection to width tol. Monotonicity of the
/// membership along the path is tested on a coarse grid, not assumed. When
/// membership never fails on [1, 2n] the cap 2n is returned.
inline double riesz_characteristic(const std::function<bool(const SymMatrix&)>& member, int n,
                                   double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("riesz_characteristic: tol must be > 0");
  const double cap = 2.0 * n;
  if (!member(riesz_test_matrix(n, 1.0)))
    throw std::runtime_error("riesz_characteristic: characteristic below 1");

  const int grid_points = 33;
  bool seen_false = false;
  double first_false = cap;
  for (int k = 0; k < grid_points; ++k) {
    double t = 1.0 + (cap - 1.0) * k / (grid_points - 1);
    bool in = member(riesz_test_matrix(n, t));
    if (!in && !seen_false) {
      seen_false = true;
      first_false = t;
    } else if (in && seen_false) {
      std::ostringstream msg;
      msg << "riesz_characteristic: membership is not monotone along the test path (regained at p="
          << t << ")";
      throw std::invalid_argument(msg.str());
    }
  }
  if (!seen_false) return cap;

  double lo = std::max(1.0, first_false - (cap - 1.0) / (grid_points - 1));
  double hi = first_false;
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (member(riesz_test_matrix(n, mid)))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace pgeom
