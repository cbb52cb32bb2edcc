#pragma once

#include <cmath>
#include <stdexcept>

#include "pgeom/core.hpp"
#include "pgeom/pcone.hpp"
#include "pgeom/spectra.hpp"
#include "pgeom/sym_matrix.hpp"

namespace pgeom {

/// The radial kernel K_p on R^n \ {0}:
///   |x|^(2-p)        1 <= p < 2
///   log |x|          p = 2
///   -1 / |x|^(p-2)   2 < p <= n
/// The p = 2 branch is taken when |p - 2| < 1e-12.
struct RieszKernel {
  PDegree p;
  int n;

  RieszKernel(PDegree degree, int ambient) : p(degree), n(ambient) {
    if (n < 2 || n > SymMatrix::kMaxDim) throw std::invalid_argument("RieszKernel: bad dimension");
    p.require_at_most(n);
  }

  RieszKernel(double degree, int ambient) : RieszKernel(PDegree(degree), ambient) {}

  bool log_branch() const { return std::abs(p.p - 2.0) < 1e-12; }
};

namespace detail {
inline double radius_checked(const Vec& x) {
  double r = norm(x);
  if (r < 1e-12) throw std::domain_error("riesz kernel: pole at x = 0");
  return r;
}
}  // namespace detail

inline double riesz_value(const RieszKernel& k, const Vec& x) {
  double r = detail::radius_checked(x);
  if (k.log_branch()) return std::log(r);
  if (k.p.p < 2.0) return std::pow(r, 2.0 - k.p.p);
  return -std::pow(r, 2.0 - k.p.p);
}

/// f'(|x|) x / |x| for the active branch.
inline Vec riesz_gradient(const RieszKernel& k, const Vec& x) {
  double r = detail::radius_checked(x);
  double fp = k.log_branch() ? 1.0 / r : std::abs(2.0 - k.p.p) * std::pow(r, 1.0 - k.p.p);
  return (fp / r) * x;
}

/// c_p(|x|) (I - p P_x) with c_p(r) = |2-p| r^(-p) (r^(-2) on the log branch).
inline SymMatrix riesz_hessian(const RieszKernel& k, const Vec& x) {
  double r = detail::radius_checked(x);
  double c = k.log_branch() ? 1.0 / (r * r) : std::abs(2.0 - k.p.p) * std::pow(r, -k.p.p);
  SymMatrix h = projector(x);
  h *= -k.p.p;
  for (int i = 0; i < h.n(); ++i) h.add(i, i, 1.0);
  h *= c;
  return h;
}

/// Sum of the p smallest eigenvalues of a Hessian; zero certifies that the
/// underlying function is p-harmonic at the point.
inline double p_harmonic_defect(const SymMatrix& hessian, const PDegree& p) {
  return ordered_eigen_sum(hessian, p);
}

inline double p_harmonic_defect(const SymMatrix& hessian, double p) {
  return ordered_eigen_sum(hessian, PDegree(p));
}

}  // namespace pgeom
