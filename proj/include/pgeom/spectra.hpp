#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "pgeom/core.hpp"
#include "pgeom/sym_matrix.hpp"

namespace pgeom {

namespace detail {

/// Cyclic Jacobi eigensolver on a dense symmetric matrix (row-major n*n).
/// Stops when the off-diagonal Frobenius norm drops below 1e-12 * ||A||_F,
/// capped at 100 sweeps. Ascending eigenvalues, ties kept in sweep order
/// (stable sort); eigenvector sign fixed by making the largest-magnitude
/// component positive. Fully deterministic for identical input bits.
struct JacobiResult {
  std::vector<double> eigenvalues;  // ascending
  std::vector<double> vectors;      // column-major n*n, column k pairs with eigenvalue k
};

inline JacobiResult jacobi_eigh(std::vector<double> a, int n, bool want_vectors) {
  const std::size_t N = static_cast<std::size_t>(n);
  if (a.size() != N * N) throw std::invalid_argument("jacobi_eigh: bad matrix size");

  double frob2 = 0.0;
  for (double v : a) frob2 += v * v;
  const double off_target2 = 1e-24 * frob2;  // (1e-12 * ||A||_F)^2

  std::vector<double> v;
  if (want_vectors) {
    v.assign(N * N, 0.0);
    for (int i = 0; i < n; ++i) v[N * i + i] = 1.0;
  }

  auto off2 = [&]() {
    double s = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) s += a[N * p + q] * a[N * p + q];
    return 2.0 * s;
  };

  const int kMaxSweeps = 100;
  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    if (off2() <= off_target2) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = a[N * p + q];
        if (apq == 0.0) continue;
        double app = a[N * p + p];
        double aqq = a[N * q + q];
        double theta = (aqq - app) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 1.0 / (2.0 * theta);
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        double tau = s / (1.0 + c);

        a[N * p + p] = app - t * apq;
        a[N * q + q] = aqq + t * apq;
        a[N * p + q] = 0.0;
        a[N * q + p] = 0.0;
        for (int k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          double akp = a[N * k + p];
          double akq = a[N * k + q];
          a[N * k + p] = akp - s * (akq + tau * akp);
          a[N * p + k] = a[N * k + p];
          a[N * k + q] = akq + s * (akp - tau * akq);
          a[N * q + k] = a[N * k + q];
        }
        if (want_vectors) {
          for (int k = 0; k < n; ++k) {
            double vkp = v[N * p + k];  // column-major: column p
            double vkq = v[N * q + k];
            v[N * p + k] = vkp - s * (vkq + tau * vkp);
            v[N * q + k] = vkq + s * (vkp - tau * vkq);
          }
        }
      }
    }
  }

  if (off2() > off_target2) {
    std::ostringstream msg;
    msg << "jacobi_eigh: no convergence after " << kMaxSweeps
        << " sweeps (n=" << n << ", off-diagonal norm " << std::sqrt(off2())
        << ", target " << std::sqrt(off_target2) << ")";
    throw std::runtime_error(msg.str());
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return a[N * i + i] < a[N * j + j]; });

  JacobiResult res;
  res.eigenvalues.resize(n);
  for (int k = 0; k < n; ++k) res.eigenvalues[k] = a[N * order[k] + order[k]];
  if (want_vectors) {
    res.vectors.assign(N * N, 0.0);
    for (int k = 0; k < n; ++k) {
      const double* src = &v[N * order[k]];
      // sign convention: largest-magnitude component positive
      int imax = 0;
      for (int i = 1; i < n; ++i)
        if (std::abs(src[i]) > std::abs(src[imax])) imax = i;
      double sgn = (src[imax] < 0.0) ? -1.0 : 1.0;
      for (int i = 0; i < n; ++i) res.vectors[N * k + i] = sgn * src[i];
    }
  }
  return res;
}

}  // namespace detail

/// Eigendecomposition with ascending eigenvalues and an orthonormal frame.
struct Spectrum {
  int n = 0;
  std::vector<double> eigenvalues;  // ascending
  std::vector<double> frame;        // column-major n*n

  Vec eigenvector(int k) const {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = frame[static_cast<std::size_t>(n) * k + i];
    return v;
  }
};

inline Spectrum eigh(const SymMatrix& a) {
  auto r = detail::jacobi_eigh(a.dense(), a.n(), true);
  return Spectrum{a.n(), std::move(r.eigenvalues), std::move(r.vectors)};
}

inline std::vector<double> eigenvalues(const SymMatrix& a) {
  return detail::jacobi_eigh(a.dense(), a.n(), false).eigenvalues;
}

/// Rebuild sum_k d[k] q_k q_k^T over (a subset of) a spectrum's frame.
inline SymMatrix from_spectral(const Spectrum& s, const std::vector<double>& d) {
  SymMatrix a(s.n);
  for (int i = 0; i < s.n; ++i)
    for (int j = i; j < s.n; ++j) {
      double v = 0.0;
      for (int k = 0; k < s.n; ++k)
        v += d[k] * s.frame[static_cast<std::size_t>(s.n) * k + i] *
             s.frame[static_cast<std::size_t>(s.n) * k + j];
      a.set(i, j, v);
    }
  return a;
}

/// Real degree p in [1, n] split into integer part and fraction.
struct PDegree {
  double p;
  int bar;      // greatest integer <= p
  double frac;  // p - bar, in [0, 1)

  explicit PDegree(double value) : p(value) {
    if (!std::isfinite(value) || value < 1.0 || value > SymMatrix::kMaxDim)
      throw std::invalid_argument("PDegree: p must lie in [1, 16]");
    bar = static_cast<int>(std::floor(value));
    frac = value - bar;
  }

  bool is_integer() const { return frac == 0.0; }

  void require_at_most(int n) const {
    if (p > n + 1e-12) throw std::invalid_argument("PDegree: p exceeds the dimension");
  }
};

/// Sum of the bar(p) smallest eigenvalues plus frac * the next one.
inline double ordered_eigen_sum(const SymMatrix& a, const PDegree& p) {
  p.require_at_most(a.n());
  auto lam = eigenvalues(a);
  int m = std::min(p.bar, a.n());
  double s = 0.0;
  for (int i = 0; i < m; ++i) s += lam[i];
  if (p.frac > 0.0 && p.bar < a.n()) s += p.frac * lam[p.bar];
  return s;
}

inline double ordered_eigen_sum(const SymMatrix& a, double p) {
  return ordered_eigen_sum(a, PDegree(p));
}

/// k orthonormal vectors spanning a k-plane in R^n.
struct PlaneFrame {
  int n = 0;
  std::vector<Vec> basis;

  PlaneFrame() = default;
  PlaneFrame(int ambient, std::vector<Vec> vectors) : n(ambient), basis(std::move(vectors)) {
    if (basis.empty() || static_cast<int>(basis.size()) > n)
      throw std::invalid_argument("PlaneFrame: need 1 <= k <= n vectors");
    for (const Vec& v : basis)
      if (static_cast<int>(v.size()) != n)
        throw std::invalid_argument("PlaneFrame: vector dimension mismatch");
  }

  int k() const { return static_cast<int>(basis.size()); }

  bool is_orthonormal(double tol = 1e-10) const {
    for (int i = 0; i < k(); ++i)
      for (int j = i; j < k(); ++j) {
        double g = dot(basis[i], basis[j]) - (i == j ? 1.0 : 0.0);
        if (std::abs(g) > tol) return false;
      }
    return true;
  }
};

/// Modified Gram-Schmidt with one re-orthogonalization pass. Returns false
/// if the columns were numerically dependent.
inline bool orthonormalize(std::vector<Vec>& cols) {
  for (std::size_t i = 0; i < cols.size(); ++i) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t j = 0; j < i; ++j) axpy(-dot(cols[j], cols[i]), cols[j], cols[i]);
    double nrm = norm(cols[i]);
    if (nrm < 1e-10) return false;
    for (double& v : cols[i]) v /= nrm;
  }
  return true;
}

/// Orthonormal basis of span(cols); numerically dependent columns are
/// dropped instead of failing.
inline std::vector<Vec> orthonormalize_span(std::vector<Vec> cols, double tol = 1e-9) {
  std::vector<Vec> out;
  for (Vec& c : cols) {
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& q : out) axpy(-dot(q, c), q, c);
    double nrm = norm(c);
    if (nrm > tol) out.push_back((1.0 / nrm) * c);
  }
  return out;
}

/// tr of A restricted to the plane W (sum of <A w_i, w_i>).
inline double trace_on_plane(const SymMatrix& a, const PlaneFrame& w) {
  if (w.n != a.n()) throw std::invalid_argument("trace_on_plane: dimension mismatch");
  if (!w.is_orthonormal()) throw std::invalid_argument("trace_on_plane: frame is not orthonormal");
  double s = 0.0;
  for (const Vec& v : w.basis) s += a.quad(v);
  return s;
}

/// Rank-one orthogonal projection onto span{e}.
inline SymMatrix projector(const Vec& e) {
  double n2 = norm2(e);
  if (!(n2 > 0.0) || !all_finite(e)) throw std::invalid_argument("projector: zero or non-finite vector");
  SymMatrix p(static_cast<int>(e.size()));
  for (int i = 0; i < p.n(); ++i)
    for (int j = i; j < p.n(); ++j) p.set(i, j, e[i] * e[j] / n2);
  return p;
}

}  // namespace pgeom
