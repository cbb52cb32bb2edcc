#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pgeom/core.hpp"

namespace pgeom {

/// Symmetric endomorphism of R^n, stored as packed upper-triangular
/// coefficients in row-major order. The storage admits no asymmetric state.
/// Dimensions are capped at 16; everything downstream is dense and small.
class SymMatrix {
 public:
  static constexpr int kMaxDim = 16;

  explicit SymMatrix(int n) : n_(n) {
    check_dim(n);
    data_.assign(static_cast<std::size_t>(n) * (n + 1) / 2, 0.0);
  }

  static SymMatrix from_upper(int n, std::vector<double> upper) {
    check_dim(n);
    if (upper.size() != static_cast<std::size_t>(n) * (n + 1) / 2)
      throw std::invalid_argument("SymMatrix: expected n(n+1)/2 upper-triangular entries");
    for (double v : upper)
      if (!std::isfinite(v)) throw std::invalid_argument("SymMatrix: entries must be finite");
    SymMatrix a(n);
    a.data_ = std::move(upper);
    return a;
  }

  static SymMatrix identity(int n) {
    SymMatrix a(n);
    for (int i = 0; i < n; ++i) a.set(i, i, 1.0);
    return a;
  }

  static SymMatrix diagonal(const Vec& d) {
    SymMatrix a(static_cast<int>(d.size()));
    for (int i = 0; i < a.n_; ++i) a.set(i, i, d[i]);
    return a;
  }

  int n() const { return n_; }

  double operator()(int i, int j) const { return data_[index(i, j)]; }

  void set(int i, int j, double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("SymMatrix: entries must be finite");
    data_[index(i, j)] = v;
  }

  void add(int i, int j, double v) { set(i, j, (*this)(i, j) + v); }

  const std::vector<double>& upper() const { return data_; }

  double inf_norm() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  double frob_norm() const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i)
      for (int j = i; j < n_; ++j) {
        double v = (*this)(i, j);
        s += (i == j ? 1.0 : 2.0) * v * v;
      }
    return std::sqrt(s);
  }

  double trace() const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += (*this)(i, i);
    return s;
  }

  Vec apply(const Vec& x) const {
    Vec y(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
      double s = 0.0;
      for (int j = 0; j < n_; ++j) s += (*this)(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  /// x^T A x
  double quad(const Vec& x) const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) {
      s += (*this)(i, i) * x[i] * x[i];
      for (int j = i + 1; j < n_; ++j) s += 2.0 * (*this)(i, j) * x[i] * x[j];
    }
    return s;
  }

  /// x^T A y
  double bilinear(const Vec& x, const Vec& y) const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) s += (*this)(i, j) * x[i] * y[j];
    return s;
  }

  std::vector<double> dense() const {
    std::vector<double> a(static_cast<std::size_t>(n_) * n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) a[static_cast<std::size_t>(i) * n_ + j] = (*this)(i, j);
    return a;
  }

  /// Frobenius inner product <A, B>.
  double frob_dot(const SymMatrix& b) const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i)
      for (int j = i; j < n_; ++j)
        s += (i == j ? 1.0 : 2.0) * (*this)(i, j) * b(i, j);
    return s;
  }

  SymMatrix& operator+=(const SymMatrix& b) {
    require_same_dim(b);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += b.data_[k];
    return *this;
  }

  SymMatrix& operator-=(const SymMatrix& b) {
    require_same_dim(b);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= b.data_[k];
    return *this;
  }

  SymMatrix& operator*=(double c) {
    for (double& v : data_) v *= c;
    return *this;
  }

  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(double c, SymMatrix a) { return a *= c; }

 private:
  static void check_dim(int n) {
    if (n < 1 || n > kMaxDim) throw std::invalid_argument("SymMatrix: dimension must be in [1, 16]");
  }

  void require_same_dim(const SymMatrix& b) const {
    if (b.n_ != n_) throw std::invalid_argument("SymMatrix: dimension mismatch");
  }

  std::size_t index(int i, int j) const {
    if (i < 0 || j < 0 || i >= n_ || j >= n_) throw std::out_of_range("SymMatrix: index");
    if (i > j) std::swap(i, j);
    return static_cast<std::size_t>(i) * n_ - static_cast<std::size_t>(i) * (i - 1) / 2 +
           static_cast<std::size_t>(j - i);
  }

  int n_;
  std::vector<double> data_;
};

}  // namespace pgeom
