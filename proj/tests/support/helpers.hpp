#pragma once

// Test-side helpers and independent oracles. Everything here is deliberately
// kept away from the library implementation paths it cross-checks.

#include <algorithm>
#include <cmath>
#include <vector>

#include "pgeom/core.hpp"
#include "pgeom/spectra.hpp"
#include "pgeom/sym_matrix.hpp"

namespace pgeom::test {

inline SymMatrix random_sym(int n, Rng& rng, double scale = 1.0) {
  SymMatrix a(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) a.set(i, j, scale * rng.normal());
  return a;
}

inline Vec random_unit(int n, Rng& rng) {
  Vec v = rng.normal_vec(n);
  double nn = norm(v);
  while (nn < 1e-8) {
    v = rng.normal_vec(n);
    nn = norm(v);
  }
  return (1.0 / nn) * v;
}

/// Random orthogonal matrix as a list of columns.
inline std::vector<Vec> random_orthogonal(int n, Rng& rng) {
  std::vector<Vec> cols(n);
  do {
    for (auto& c : cols) c = rng.normal_vec(n);
  } while (!orthonormalize(cols));
  return cols;
}

/// Q A Q^T for an orthogonal Q given by columns (n <= 16, direct sums).
inline SymMatrix conjugate(const SymMatrix& a, const std::vector<Vec>& q) {
  int n = a.n();
  SymMatrix out(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) s += q[k][i] * a(k, l) * q[l][j];
      out.set(i, j, s);
    }
  return out;
}

/// Determinant of the p x p minor of the column frame [w_1 ... w_p] taken at
/// rows I: the e_I coordinate of w_1 ^ ... ^ w_p. Gaussian elimination.
inline double wedge_coordinate(const std::vector<Vec>& w, const std::vector<int>& rows) {
  int p = static_cast<int>(w.size());
  std::vector<double> m(static_cast<std::size_t>(p) * p);
  for (int r = 0; r < p; ++r)
    for (int c = 0; c < p; ++c) m[static_cast<std::size_t>(r) * p + c] = w[c][rows[r]];
  double det = 1.0;
  for (int col = 0; col < p; ++col) {
    int piv = col;
    for (int r = col + 1; r < p; ++r)
      if (std::abs(m[static_cast<std::size_t>(r) * p + col]) >
          std::abs(m[static_cast<std::size_t>(piv) * p + col]))
        piv = r;
    if (m[static_cast<std::size_t>(piv) * p + col] == 0.0) return 0.0;
    if (piv != col) {
      for (int c = 0; c < p; ++c)
        std::swap(m[static_cast<std::size_t>(piv) * p + c], m[static_cast<std::size_t>(col) * p + c]);
      det = -det;
    }
    double d = m[static_cast<std::size_t>(col) * p + col];
    det *= d;
    for (int r = col + 1; r < p; ++r) {
      double f = m[static_cast<std::size_t>(r) * p + col] / d;
      for (int c = col; c < p; ++c)
        m[static_cast<std::size_t>(r) * p + c] -= f * m[static_cast<std::size_t>(col) * p + c];
    }
  }
  return det;
}

}  // namespace pgeom::test
