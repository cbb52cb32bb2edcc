#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace pgeom {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

inline double inf_norm(const Vec& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

inline Vec operator+(Vec a, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

inline Vec operator-(Vec a, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

inline Vec operator*(double c, Vec a) {
  for (double& v : a) v *= c;
  return a;
}

inline void axpy(double c, const Vec& x, Vec& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

inline bool all_finite(const Vec& a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

inline Vec unit_vector(int n, int k) {
  Vec e(n, 0.0);
  e[k] = 1.0;
  return e;
}

/// Axis-aligned box domain. Fields evaluate on the open interior.
struct Box {
  Vec lo, hi;

  Box() = default;
  Box(Vec lo_, Vec hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
    if (lo.size() != hi.size()) throw std::invalid_argument("box: lo/hi size mismatch");
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (!(lo[i] < hi[i])) throw std::invalid_argument("box: lo must be < hi on every axis");
  }

  static Box cube(int n, double lo, double hi) { return Box(Vec(n, lo), Vec(n, hi)); }

  int dim() const { return static_cast<int>(lo.size()); }

  bool contains(const Vec& x, double pad = 0.0) const {
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (!(x[i] > lo[i] + pad && x[i] < hi[i] - pad)) return false;
    return true;
  }

  double extent(int axis) const { return hi[axis] - lo[axis]; }

  double max_extent() const {
    double m = 0.0;
    for (std::size_t i = 0; i < lo.size(); ++i) m = std::max(m, hi[i] - lo[i]);
    return m;
  }

  Vec center() const {
    Vec c(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) c[i] = 0.5 * (lo[i] + hi[i]);
    return c;
  }

  /// Distance from a point outside (or inside: 0) to the box.
  double distance(const Vec& x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < lo.size(); ++i) {
      double d = std::max({lo[i] - x[i], x[i] - hi[i], 0.0});
      s += d * d;
    }
    return std::sqrt(s);
  }
};

/// Deterministic random stream (splitmix64 core, Box-Muller normals).
/// Everything is hand-rolled because std::normal_distribution output is
/// implementation defined and reports must reproduce bit-for-bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return engine_step(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_step() >> 11) * 0x1.0p-53; }

  /// Uniform in [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Standard normal via Box-Muller (deterministic, no rejection).
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  Vec normal_vec(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  /// Uniform integer in [0, m).
  std::uint64_t below(std::uint64_t m) { return engine_step() % m; }

  Vec point_in_box(const Box& box, double pad = 0.0) {
    Vec x(box.dim());
    for (int i = 0; i < box.dim(); ++i) x[i] = uniform(box.lo[i] + pad, box.hi[i] - pad);
    return x;
  }

 private:
  // splitmix64; statistically fine for test/sampling use and fully portable.
  std::uint64_t engine_step() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace pgeom
