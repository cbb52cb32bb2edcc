#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pgeom/core.hpp"
#include "pgeom/pcone.hpp"
#include "pgeom/riesz.hpp"
#include "pgeom/spectra.hpp"
#include "pgeom/sym_matrix.hpp"

namespace pgeom {

/// A scalar field on an open box domain. Evaluation outside the box throws
/// std::domain_error, which is how finite-difference stencils report that
/// they left the domain. Analytic gradient/Hessian evaluators are optional;
/// when attached they are cross-checked against central differences on 32
/// deterministic sample points.
class ScalarField {
 public:
  using Eval = std::function<double(const Vec&)>;
  using GradFn = std::function<Vec(const Vec&)>;
  using HessFn = std::function<SymMatrix(const Vec&)>;
  using NonsmoothFn = std::function<bool(const Vec&, double)>;

  ScalarField(int n, Box domain, Eval eval, std::string name = "field")
      : n_(n), domain_(std::move(domain)), eval_(std::move(eval)), name_(std::move(name)) {
    if (domain_.dim() != n_) throw std::invalid_argument("ScalarField: box dimension mismatch");
    check_finite_on_samples();
  }

  int n() const { return n_; }
  const Box& domain() const { return domain_; }
  const std::string& name() const { return name_; }

  double value(const Vec& x) const {
    require_inside(x);
    return eval_(x);
  }

  /// Central-difference step at x: fd_step * max(1, |x|_inf).
  double step_at(const Vec& x) const { return fd_step_ * std::max(1.0, inf_norm(x)); }
  double fd_step() const { return fd_step_; }

  bool has_gradient() const { return static_cast<bool>(grad_); }
  bool has_hessian() const { return static_cast<bool>(hess_); }

  /// Analytic gradient when attached, central differences otherwise.
  Vec gradient(const Vec& x) const {
    require_inside(x);
    if (grad_) return grad_(x);
    return fd_gradient_at(x, step_at(x));
  }

  SymMatrix analytic_hessian(const Vec& x) const {
    if (!hess_) throw std::logic_error("ScalarField: no analytic hessian attached");
    require_inside(x);
    return hess_(x);
  }

  bool nonsmooth_near(const Vec& x, double h) const {
    return nonsmooth_ ? nonsmooth_(x, h) : false;
  }

  ScalarField& with_fd_step(double s) {
    if (!(s > 0.0) || s > 0.1) throw std::invalid_argument("ScalarField: fd step out of range");
    fd_step_ = s;
    return *this;
  }

  ScalarField& with_gradient(GradFn g) {
    grad_ = std::move(g);
    validate_gradient();
    return *this;
  }

  ScalarField& with_hessian(HessFn h) {
    hess_ = std::move(h);
    validate_hessian();
    return *this;
  }

  ScalarField& with_nonsmooth_marker(NonsmoothFn f) {
    nonsmooth_ = std::move(f);
    return *this;
  }

  /// Skips the analytic-vs-FD agreement check. Reserved for evaluators whose
  /// derivatives are exact by construction but expensive to sample.
  ScalarField& with_gradient_unchecked(GradFn g) {
    grad_ = std::move(g);
    return *this;
  }

  Vec fd_gradient_at(const Vec& x, double h) const {
    Vec g(n_);
    Vec xp = x, xm = x;
    for (int i = 0; i < n_; ++i) {
      xp[i] = x[i] + h;
      xm[i] = x[i] - h;
      g[i] = (value(xp) - value(xm)) / (2.0 * h);
      xp[i] = x[i];
      xm[i] = x[i];
    }
    return g;
  }

 private:
  void require_inside(const Vec& x) const {
    if (static_cast<int>(x.size()) != n_)
      throw std::invalid_argument("ScalarField: point dimension mismatch");
    if (!domain_.contains(x)) {
      std::ostringstream msg;
      msg << name_ << ": point outside the domain box";
      throw std::domain_error(msg.str());
    }
  }

  /// Sample points for construction checks. Evaluators may gate a smaller
  /// true domain inside the box (e.g. distance-based fields) by throwing
  /// std::domain_error; such samples are skipped.
  std::vector<Vec> validation_points() const {
    Rng rng(0x5EEDF1E1DULL);
    std::vector<Vec> pts;
    double pad = 4.0 * fd_step_ * 8.0;  // generous stencil margin at |x| up to ~8
    pad = std::min(pad, 0.25 * domain_.max_extent());
    for (int k = 0; k < 64 && pts.size() < 32; ++k) {
      Vec x = rng.point_in_box(domain_, pad);
      try {
        eval_(x);
        pts.push_back(std::move(x));
      } catch (const std::domain_error&) {
      }
    }
    return pts;
  }

  void check_finite_on_samples() const {
    for (const Vec& x : validation_points())
      if (!std::isfinite(eval_(x)))
        throw std::invalid_argument(name_ + ": evaluator is not finite on the domain box");
  }

  void validate_gradient() const {
    for (const Vec& x : validation_points()) {
      double h = step_at(x);
      try {
        Vec ga = grad_(x);
        Vec gf = fd_gradient_at(x, h);
        double scale = std::max({1.0, inf_norm(ga), inf_norm(gf)});
        if (inf_norm(ga - gf) > 1e-4 * scale)
          throw std::invalid_argument(name_ +
                                      ": analytic gradient disagrees with finite differences");
      } catch (const std::domain_error&) {
      }
    }
  }

  void validate_hessian() const;  // defined below (needs fd_hessian)

  int n_;
  Box domain_;
  Eval eval_;
  std::string name_;
  GradFn grad_;
  HessFn hess_;
  NonsmoothFn nonsmooth_;
  double fd_step_ = 1e-4;
};

/// Symmetrized central second differences; exact (up to rounding) on
/// polynomials of degree <= 3. The step is frozen at the stencil center.
inline SymMatrix fd_hessian(const ScalarField& f, const Vec& x, double step) {
  const int n = f.n();
  const double h = step;
  SymMatrix hess(n);
  const double f0 = f.value(x);
  Vec y = x;
  for (int i = 0; i < n; ++i) {
    y[i] = x[i] + h;
    double fp = f.value(y);
    y[i] = x[i] - h;
    double fm = f.value(y);
    y[i] = x[i];
    hess.set(i, i, (fp - 2.0 * f0 + fm) / (h * h));
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      y[i] = x[i] + h; y[j] = x[j] + h;
      double fpp = f.value(y);
      y[j] = x[j] - h;
      double fpm = f.value(y);
      y[i] = x[i] - h; y[j] = x[j] + h;
      double fmp = f.value(y);
      y[j] = x[j] - h;
      double fmm = f.value(y);
      y[i] = x[i]; y[j] = x[j];
      hess.set(i, j, (fpp - fpm - fmp + fmm) / (4.0 * h * h));
    }
  return hess;
}

inline SymMatrix fd_hessian(const ScalarField& f, const Vec& x) {
  return fd_hessian(f, x, f.step_at(x));
}

inline void ScalarField::validate_hessian() const {
  for (const Vec& x : validation_points()) {
    try {
      SymMatrix ha = hess_(x);
      SymMatrix hf = fd_hessian(*this, x);
      double scale = std::max({1.0, ha.inf_norm(), hf.inf_norm()});
      if ((ha - hf).inf_norm() > 1e-4 * scale)
        throw std::invalid_argument(name_ + ": analytic hessian disagrees with finite differences");
    } catch (const std::domain_error&) {
    }
  }
}

/// Per-point outcome of a p-plurisubharmonicity sweep. Points where the
/// field is flagged non-smooth, or where the stencil leaves the domain,
/// carry an annotation instead of a verdict.
struct PshPointReport {
  Vec point;
  std::optional<ConeVerdict> verdict;
  std::string annotation;
};

inline std::vector<PshPointReport> psh_report(const ScalarField& f, const std::vector<Vec>& points,
                                              const PDegree& p, double tol = kConeTol) {
  std::vector<PshPointReport> out;
  out.reserve(points.size());
  for (const Vec& x : points) {
    PshPointReport rep;
    rep.point = x;
    double h = f.step_at(x);
    if (f.nonsmooth_near(x, h)) {
      rep.annotation = "non-smooth point";
    } else {
      try {
        rep.verdict = is_p_positive(fd_hessian(f, x), p, tol);
      } catch (const std::domain_error& e) {
        rep.annotation = std::string("stencil leaves domain: ") + e.what();
      }
    }
    out.push_back(std::move(rep));
  }
  return out;
}

/// Finite-difference Laplacian of f restricted to the affine plane
/// base + span(W), evaluated at in-plane offset s.
inline double restriction_laplacian(const ScalarField& f, const Vec& base, const PlaneFrame& w,
                                    const Vec& s) {
  if (w.n != f.n()) throw std::invalid_argument("restriction_laplacian: dimension mismatch");
  if (!w.is_orthonormal()) throw std::invalid_argument("restriction_laplacian: frame not orthonormal");
  if (static_cast<int>(s.size()) != w.k())
    throw std::invalid_argument("restriction_laplacian: offset dimension mismatch");
  auto at = [&](const Vec& t) {
    Vec x = base;
    for (int i = 0; i < w.k(); ++i) axpy(t[i], w.basis[i], x);
    return x;
  };
  Vec x0 = at(s);
  const double h = f.step_at(x0);
  const double f0 = f.value(x0);
  double lap = 0.0;
  Vec t = s;
  for (int i = 0; i < w.k(); ++i) {
    t[i] = s[i] + h;
    double fp = f.value(at(t));
    t[i] = s[i] - h;
    double fm = f.value(at(t));
    t[i] = s[i];
    lap += (fp - 2.0 * f0 + fm) / (h * h);
  }
  return lap;
}

/// Built-in minimal surface patches with analytic tangent frames. Only the
/// listed parameterizations are accepted: their minimality is classical,
/// which is what restriction-based certificates rely on. The affine patch
/// generalizes to p parameters in R^n.
class MinimalSurfacePatch {
 public:
  enum class Kind { AffinePlane, Catenoid, Helicoid, Enneper };

  static MinimalSurfacePatch affine_plane(Vec base, PlaneFrame frame) {
    if (!frame.is_orthonormal())
      throw std::invalid_argument("MinimalSurfacePatch: affine frame must be orthonormal");
    MinimalSurfacePatch m(Kind::AffinePlane, frame.n, frame.k());
    m.base_ = std::move(base);
    m.frame_ = std::move(frame);
    return m;
  }
  static MinimalSurfacePatch catenoid() { return MinimalSurfacePatch(Kind::Catenoid, 3, 2); }
  static MinimalSurfacePatch helicoid() { return MinimalSurfacePatch(Kind::Helicoid, 3, 2); }
  static MinimalSurfacePatch enneper() { return MinimalSurfacePatch(Kind::Enneper, 3, 2); }

  Kind kind() const { return kind_; }
  int ambient_n() const { return ambient_n_; }
  int param_dim() const { return param_dim_; }

  std::string name() const {
    switch (kind_) {
      case Kind::AffinePlane: return "affine-plane";
      case Kind::Catenoid: return "catenoid";
      case Kind::Helicoid: return "helicoid";
      default: return "enneper";
    }
  }

  Vec point(const Vec& uv) const {
    check_uv(uv);
    switch (kind_) {
      case Kind::AffinePlane: {
        Vec x = base_;
        for (int i = 0; i < param_dim_; ++i) axpy(uv[i], frame_.basis[i], x);
        return x;
      }
      case Kind::Catenoid: {
        double u = uv[0], v = uv[1];
        return {std::cosh(v) * std::cos(u), std::cosh(v) * std::sin(u), v};
      }
      case Kind::Helicoid: {
        double u = uv[0], v = uv[1];
        return {v * std::cos(u), v * std::sin(u), u};
      }
      default: {  // Enneper (Weierstrass data f = 1, g = z)
        double u = uv[0], v = uv[1];
        return {u - u * u * u / 3.0 + u * v * v, -v + v * v * v / 3.0 - u * u * v, u * u - v * v};
      }
    }
  }

  /// Orthonormalized analytic coordinate tangents at uv.
  PlaneFrame tangent_frame(const Vec& uv) const {
    check_uv(uv);
    if (kind_ == Kind::AffinePlane) return frame_;
    double u = uv[0], v = uv[1];
    Vec su, sv;
    switch (kind_) {
      case Kind::Catenoid:
        su = {-std::cosh(v) * std::sin(u), std::cosh(v) * std::cos(u), 0.0};
        sv = {std::sinh(v) * std::cos(u), std::sinh(v) * std::sin(u), 1.0};
        break;
      case Kind::Helicoid:
        su = {-v * std::sin(u), v * std::cos(u), 1.0};
        sv = {std::cos(u), std::sin(u), 0.0};
        break;
      default:
        su = {1.0 - u * u + v * v, -2.0 * u * v, 2.0 * u};
        sv = {2.0 * u * v, -1.0 + v * v - u * u, -2.0 * v};
        break;
    }
    std::vector<Vec> cols{su, sv};
    if (!orthonormalize(cols))
      throw std::runtime_error("MinimalSurfacePatch: degenerate tangent frame at this parameter");
    return PlaneFrame(3, cols);
  }

 private:
  MinimalSurfacePatch(Kind k, int n, int p) : kind_(k), ambient_n_(n), param_dim_(p) {}

  void check_uv(const Vec& uv) const {
    if (static_cast<int>(uv.size()) != param_dim_)
      throw std::invalid_argument("MinimalSurfacePatch: parameter dimension mismatch");
  }

  Kind kind_;
  int ambient_n_;
  int param_dim_;
  Vec base_;
  PlaneFrame frame_;
};

/// tr of the FD Hessian of f over the patch tangent plane at uv. For a
/// p-plurisubharmonic f this is >= 0 up to FD error: the subharmonicity
/// certificate for restrictions to minimal submanifolds. Note the coverage
/// is partial by construction: only affine planes and the three built-in
/// classical surfaces are exercised, which certifies at desk scale without
/// quantifying over all minimal submanifolds.
inline double minimal_restriction_trace(const ScalarField& f, const MinimalSurfacePatch& patch,
                                        const Vec& uv) {
  if (patch.ambient_n() != f.n())
    throw std::invalid_argument("minimal_restriction_trace: ambient dimension mismatch");
  Vec x = patch.point(uv);
  return trace_on_plane(fd_hessian(f, x), patch.tangent_frame(uv));
}

/// div( grad g / sqrt(1 + |grad g|^2) ) by central differences: the minimal
/// surface equation residual of the graph of g.
inline double minimal_graph_residual(const ScalarField& g, const Vec& t) {
  const int p = g.n();
  const double h = g.step_at(t);
  auto flux = [&](const Vec& y, int i) {
    Vec grad = g.gradient(y);
    return grad[i] / std::sqrt(1.0 + norm2(grad));
  };
  double div = 0.0;
  Vec y = t;
  for (int i = 0; i < p; ++i) {
    y[i] = t[i] + h;
    double fp = flux(y, i);
    y[i] = t[i] - h;
    double fm = flux(y, i);
    y[i] = t[i];
    div += (fp - fm) / (2.0 * h);
  }
  return div;
}

// ---------------------------------------------------------------------------
// Field builders
// ---------------------------------------------------------------------------

struct PolyTerm {
  double coef = 0.0;
  std::vector<int> powers;  // one exponent per coordinate
};

/// Polynomial field with exact analytic derivatives.
inline ScalarField polynomial_field(int n, Box domain, std::vector<PolyTerm> terms,
                                    std::string name = "poly") {
  for (const auto& t : terms) {
    if (static_cast<int>(t.powers.size()) != n)
      throw std::invalid_argument("polynomial_field: term power list must have n entries");
    for (int e : t.powers)
      if (e < 0) throw std::invalid_argument("polynomial_field: negative exponent");
    if (!std::isfinite(t.coef)) throw std::invalid_argument("polynomial_field: non-finite coefficient");
  }
  auto shared = std::make_shared<std::vector<PolyTerm>>(std::move(terms));

  auto mono = [](double x, int e) {
    double r = 1.0;
    for (int k = 0; k < e; ++k) r *= x;
    return r;
  };
  auto eval = [shared, mono](const Vec& x) {
    double s = 0.0;
    for (const auto& t : *shared) {
      double m = t.coef;
      for (std::size_t i = 0; i < x.size(); ++i) m *= mono(x[i], t.powers[i]);
      s += m;
    }
    return s;
  };
  auto grad = [shared, mono, n](const Vec& x) {
    Vec g(n, 0.0);
    for (const auto& t : *shared)
      for (int d = 0; d < n; ++d) {
        if (t.powers[d] == 0) continue;
        double m = t.coef * t.powers[d];
        for (int i = 0; i < n; ++i) m *= mono(x[i], i == d ? t.powers[i] - 1 : t.powers[i]);
        g[d] += m;
      }
    return g;
  };
  auto hess = [shared, mono, n](const Vec& x) {
    SymMatrix h(n);
    for (const auto& t : *shared)
      for (int d1 = 0; d1 < n; ++d1)
        for (int d2 = d1; d2 < n; ++d2) {
          int e1 = t.powers[d1], e2 = t.powers[d2];
          double c;
          if (d1 == d2) {
            if (e1 < 2) continue;
            c = t.coef * e1 * (e1 - 1);
          } else {
            if (e1 < 1 || e2 < 1) continue;
            c = t.coef * e1 * e2;
          }
          for (int i = 0; i < n; ++i) {
            int e = t.powers[i];
            if (i == d1) e -= 1;
            if (i == d2) e -= 1;
            c *= mono(x[i], e);
          }
          h.add(d1, d2, c);
        }
    return h;
  };

  ScalarField f(n, std::move(domain), eval, std::move(name));
  f.with_gradient(grad).with_hessian(hess);
  return f;
}

/// Riesz kernel translate x -> K_p(x - pole). The pole must lie outside the
/// domain box (smoothed kernels are not certified by anything and are
/// deliberately not offered).
inline ScalarField riesz_translate_field(const PDegree& p, int n, Box domain, Vec pole,
                                         std::string name = "") {
  if (static_cast<int>(pole.size()) != n)
    throw std::invalid_argument("riesz_translate_field: pole dimension mismatch");
  if (domain.contains(pole) || domain.distance(pole) < 1e-9)
    throw std::invalid_argument("riesz_translate_field: pole must lie outside the domain box");
  RieszKernel k(p, n);
  auto shift = [pole](const Vec& x) { return x - pole; };
  if (name.empty()) name = "riesz-translate";
  ScalarField f(n, std::move(domain),
                [k, shift](const Vec& x) { return riesz_value(k, shift(x)); }, std::move(name));
  f.with_gradient([k, shift](const Vec& x) { return riesz_gradient(k, shift(x)); })
      .with_hessian([k, shift](const Vec& x) { return riesz_hessian(k, shift(x)); });
  return f;
}

/// Built-in fields addressable by name: "norm2", "riesz:<p>", "coordinate:<i>".
inline ScalarField builtin_field(const std::string& name, int n, Box domain) {
  if (name == "norm2") {
    std::vector<PolyTerm> terms;
    for (int i = 0; i < n; ++i) {
      PolyTerm t;
      t.coef = 1.0;
      t.powers.assign(n, 0);
      t.powers[i] = 2;
      terms.push_back(t);
    }
    return polynomial_field(n, std::move(domain), std::move(terms), "norm2");
  }
  if (name.rfind("coordinate:", 0) == 0) {
    int i = std::stoi(name.substr(11));
    if (i < 0 || i >= n) throw std::invalid_argument("builtin_field: coordinate index out of range");
    PolyTerm t;
    t.coef = 1.0;
    t.powers.assign(n, 0);
    t.powers[i] = 1;
    return polynomial_field(n, std::move(domain), {t}, name);
  }
  if (name.rfind("riesz:", 0) == 0) {
    double p = std::stod(name.substr(6));
    return riesz_translate_field(PDegree(p), n, std::move(domain), Vec(n, 0.0), name);
  }
  throw std::invalid_argument("builtin_field: unknown field name '" + name + "'");
}

}  // namespace pgeom
