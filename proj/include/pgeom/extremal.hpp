#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pgeom/core.hpp"
#include "pgeom/pcone.hpp"
#include "pgeom/spectra.hpp"
#include "pgeom/sym_matrix.hpp"

namespace pgeom {

enum class RayLabel {
  ExtremeNegEig,       // spectrum ~ (-(p-1), 1, ..., 1), positive scale
  ExtremeProjection,   // spectrum ~ (0, ..., 0, 1) and 1 < p < n-1
  BoundaryNotExtreme,  // boundary with a verified decomposition witness
  Interior,
  Outside,
};

inline const char* to_string(RayLabel l) {
  switch (l) {
    case RayLabel::ExtremeNegEig: return "extreme_neg_eig";
    case RayLabel::ExtremeProjection: return "extreme_projection";
    case RayLabel::BoundaryNotExtreme: return "boundary_not_extreme";
    case RayLabel::Interior: return "interior";
    default: return "outside";
  }
}

struct RayClass {
  RayLabel label;
  ConeVerdict verdict;
  std::vector<double> witness_spectrum;  // eigenvalues of A / ||A||_F, ascending
  std::optional<std::pair<SymMatrix, SymMatrix>> decomposition;  // (B, C) with A = B + C
};

/// The two extreme-ray generator families (I - p P_e, P_e). The first
/// lies on the boundary of P_p for every real p.
inline std::pair<SymMatrix, SymMatrix> generators(const PDegree& p, int n, const Vec& e) {
  if (static_cast<int>(e.size()) != n) throw std::invalid_argument("generators: dimension mismatch");
  if (std::abs(norm(e) - 1.0) > 1e-10) throw std::invalid_argument("generators: e must be a unit vector");
  if (!(p.p > 1.0 && p.p < n)) throw std::invalid_argument("generators: need 1 < p < n");
  SymMatrix pe = projector(e);
  SymMatrix g1 = (-p.p) * pe;
  for (int i = 0; i < n; ++i) g1.add(i, i, 1.0);
  return {std::move(g1), std::move(pe)};
}

namespace detail {

inline double ray_angle(const SymMatrix& b, const SymMatrix& c) {
  double cosv = b.frob_dot(c) / (b.frob_norm() * c.frob_norm());
  cosv = std::clamp(cosv, -1.0, 1.0);
  return std::acos(cosv);
}

/// Residual of the normalized spectrum against a normalized pattern ray.
inline bool matches_pattern(const std::vector<double>& lam_hat, std::vector<double> pattern,
                            double tol) {
  double pn = 0.0;
  for (double v : pattern) pn += v * v;
  pn = std::sqrt(pn);
  for (double& v : pattern) v /= pn;
  double proj = 0.0;
  for (std::size_t i = 0; i < lam_hat.size(); ++i) proj += lam_hat[i] * pattern[i];
  if (proj <= 0.0) return false;
  double resid2 = 0.0;
  for (std::size_t i = 0; i < lam_hat.size(); ++i) {
    double r = lam_hat[i] - proj * pattern[i];
    resid2 += r * r;
  }
  return std::sqrt(resid2) <= tol;
}

}  // namespace detail

/// Re-verifies a decomposition witness: A = B + C within 1e-10, both margins
/// >= -1e-8 (relative), and the rays of B and C separated by >= 1e-3.
inline void verify_decomposition(const SymMatrix& a, const SymMatrix& b, const SymMatrix& c,
                                 const PDegree& p) {
  double scale = std::max(1.0, a.inf_norm());
  if ((a - (b + c)).inf_norm() > 1e-10 * scale)
    throw std::logic_error("decomposition witness: A != B + C");
  double mb = ordered_eigen_sum(b, p);
  double mc = ordered_eigen_sum(c, p);
  if (mb < -1e-8 * std::max(1.0, b.inf_norm()) || mc < -1e-8 * std::max(1.0, c.inf_norm()))
    throw std::logic_error("decomposition witness: a part leaves the cone");
  if (detail::ray_angle(b, c) < 1e-3)
    throw std::logic_error("decomposition witness: rays not distinct");
}

/// Spectral classification of a boundary ray of P_p for real 1 < p < n.
/// Boundary points matching neither extreme pattern receive a decomposition
/// witness: the two-negative split, the one-negative split along the
/// (I - p P_e)-direction, or the positive spectral split. p = 1 is the
/// classical positive-semidefinite cone and has its own entry point below.
inline RayClass classify_ray(const SymMatrix& a, const PDegree& p, double tol = 1e-6) {
  const int n = a.n();
  if (!(p.p > 1.0 && p.p < n))
    throw std::invalid_argument("classify_ray: need 1 < p < n (P_n is a half-space; p=1 is classical)");
  if (a.frob_norm() == 0.0)
    throw std::invalid_argument("classify_ray: the zero matrix spans no ray");

  RayClass out;
  out.verdict = is_p_positive(a, p, tol);
  Spectrum sp = eigh(a);
  double fn = a.frob_norm();
  out.witness_spectrum = sp.eigenvalues;
  if (fn > 0.0)
    for (double& v : out.witness_spectrum) v /= fn;

  if (out.verdict.status == ConeStatus::Interior) {
    out.label = RayLabel::Interior;
    return out;
  }
  if (out.verdict.status == ConeStatus::Outside) {
    out.label = RayLabel::Outside;
    return out;
  }

  const double kPatternTol = 1e-6;
  std::vector<double> pat1(n, 1.0);
  pat1[0] = -(p.p - 1.0);
  if (detail::matches_pattern(out.witness_spectrum, pat1, kPatternTol)) {
    out.label = RayLabel::ExtremeNegEig;
    return out;
  }
  std::vector<double> pat2(n, 0.0);
  pat2[n - 1] = 1.0;
  bool is_projection = detail::matches_pattern(out.witness_spectrum, pat2, kPatternTol);
  if (is_projection && p.p < n - 1) {
    out.label = RayLabel::ExtremeProjection;
    return out;
  }

  out.label = RayLabel::BoundaryNotExtreme;
  const auto& lam = sp.eigenvalues;
  const double eps_zero = 1e-12 * std::max(1.0, a.inf_norm());
  std::vector<double> db(n, 0.0), dc(n, 0.0);

  if (is_projection) {
    // rank-one boundary ray at p >= n-1: average of (I - p P_u) generators
    // over the complementary eigenvectors recovers P_u; peel one term off.
    double c = lam[n - 1];
    double t = c / (n - 1.0);
    for (int i = 0; i < n; ++i) db[i] = t;
    db[0] = t * (1.0 - p.p);  // t (I - p P_{u_0}) in the eigenframe
    for (int i = 0; i < n; ++i) dc[i] = lam[i] - db[i];
  } else if (lam[1] < -eps_zero) {
    // two strictly negative eigenvalues: the classical split
    double alpha = lam[0] + lam[1];
    double s = lam[0] / alpha;
    db[0] = s * alpha;  // s * (alpha, 0, lam_2, ...)
    for (int i = 2; i < n; ++i) db[i] = s * lam[i];
    dc[1] = (1.0 - s) * alpha;
    for (int i = 2; i < n; ++i) dc[i] = (1.0 - s) * lam[i];
  } else if (lam[0] < -eps_zero) {
    // one negative eigenvalue: peel off the boundary generator direction
    double t = -lam[0] / (p.p - 1.0);
    db[0] = lam[0];
    for (int i = 1; i < n; ++i) db[i] = t;
    for (int i = 1; i < n; ++i) dc[i] = lam[i] - t;
  } else {
    // positive semidefinite boundary point of rank >= 2: spectral split
    db[n - 1] = lam[n - 1];
    for (int i = 0; i < n - 1; ++i) dc[i] = lam[i];
  }

  SymMatrix b = from_spectral(sp, db);
  SymMatrix c = from_spectral(sp, dc);
  verify_decomposition(a, b, c, p);
  out.decomposition = std::make_pair(std::move(b), std::move(c));
  return out;
}

inline RayClass classify_ray(const SymMatrix& a, double p, double tol = 1e-6) {
  return classify_ray(a, PDegree(p), tol);
}

/// Classical mode for p = 1 (the positive-semidefinite cone): extreme rays
/// are exactly the rank-one projections.
inline RayClass classify_ray_convex(const SymMatrix& a, double tol = 1e-6) {
  RayClass out;
  out.verdict = is_p_positive(a, PDegree(1.0), tol);
  Spectrum sp = eigh(a);
  double fn = a.frob_norm();
  out.witness_spectrum = sp.eigenvalues;
  if (fn > 0.0)
    for (double& v : out.witness_spectrum) v /= fn;
  if (out.verdict.status == ConeStatus::Interior) {
    out.label = RayLabel::Interior;
    return out;
  }
  if (out.verdict.status == ConeStatus::Outside) {
    out.label = RayLabel::Outside;
    return out;
  }
  int rank = 0;
  for (double v : sp.eigenvalues)
    if (v > out.verdict.tol) ++rank;
  if (rank <= 1) {
    out.label = RayLabel::ExtremeProjection;
    return out;
  }
  out.label = RayLabel::BoundaryNotExtreme;
  const int n = a.n();
  std::vector<double> db(n, 0.0), dc(n, 0.0);
  db[n - 1] = sp.eigenvalues[n - 1];
  for (int i = 0; i < n - 1; ++i) dc[i] = std::max(sp.eigenvalues[i], 0.0);
  SymMatrix b = from_spectral(sp, db);
  SymMatrix c = from_spectral(sp, dc);
  out.decomposition = std::make_pair(std::move(b), std::move(c));
  return out;
}

struct FaceOracleResult {
  int dimension = 1;                        // 1 + number of surviving directions
  std::vector<SymMatrix> surviving;         // orthonormal face directions, A excluded
  int planes_kept = 0;
  int nullspace_dim = 0;
};

/// Independent face-dimension probe of a boundary point A of P_p (integer p):
/// sample p-planes concentrated near the minimizers of tr_W A, solve
/// tr_W B = 0 in the least-squares sense over symmetric B, and keep the
/// nullspace directions B (orthogonal to A) for which A +- t_step B stays in
/// the cone at margin tolerance 10 tol. Extremality <=> dimension 1.
inline FaceOracleResult face_dimension_oracle(const SymMatrix& a, int p, int plane_samples,
                                              double t_step, double tol, std::uint64_t seed) {
  const int n = a.n();
  if (p <= 1 || p >= n) throw std::invalid_argument("face_dimension_oracle: need integer 1 < p < n");
  if (plane_samples < 1) throw std::invalid_argument("face_dimension_oracle: need plane_samples >= 1");
  ConeVerdict v = is_p_positive(a, PDegree(static_cast<double>(p)), tol);
  if (v.status != ConeStatus::Boundary)
    throw std::invalid_argument("face_dimension_oracle: A is not on the cone boundary");

  const double tol_eff = tol * std::max(1.0, a.inf_norm());
  Spectrum sp = eigh(a);

  // The minimizer set of tr_W A is determined by the eigenvalue group at the
  // cut: every minimizing plane is (eigenvectors strictly below the cut
  // value) + (any k_c-dimensional subspace of the cut eigenspace). Sampled
  // planes Haar-rotate the free part, so the constraint system sees the full
  // minimizer family when eigenvalues are degenerate. No extra jitter: rows
  // must stay exact minimizers or their singular values smear across the
  // nullspace cutoff and drag face directions out with them.
  const double gap_tol = 1e-6 * std::max(1.0, a.inf_norm());
  const double cut = sp.eigenvalues[p - 1];
  std::vector<Vec> below, group;
  for (int i = 0; i < n; ++i) {
    if (sp.eigenvalues[i] < cut - gap_tol)
      below.push_back(sp.eigenvector(i));
    else if (std::abs(sp.eigenvalues[i] - cut) <= gap_tol)
      group.push_back(sp.eigenvector(i));
  }
  const int kc = p - static_cast<int>(below.size());

  Rng rng(seed);
  std::vector<PlaneFrame> kept;
  for (int s = 0; s < plane_samples; ++s) {
    std::vector<Vec> cols = below;
    if (s % 5 == 0) {  // 1:4 exact-to-resampled mix
      for (int k = 0; k < kc; ++k) cols.push_back(group[k]);
    } else {
      // Haar-random kc-subspace of the cut eigenspace
      for (int k = 0; k < kc; ++k) {
        Vec v(n, 0.0);
        for (const Vec& g : group) axpy(rng.normal(), g, v);
        cols.push_back(std::move(v));
      }
    }
    if (!orthonormalize(cols)) continue;
    PlaneFrame w(n, cols);
    double t = 0.0;
    for (const Vec& col : w.basis) t += a.quad(col);
    if (t <= tol_eff) kept.push_back(std::move(w));
  }
  if (kept.empty()) throw std::runtime_error("face_dimension_oracle: empty minimizer sample");

  // least-squares nullspace of { tr_W B = 0 } over Sym(n), spectral cutoff 1e-8
  const int m = n * (n + 1) / 2;
  std::vector<std::pair<int, int>> coords;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) coords.emplace_back(i, j);
  const double sqrt2 = std::sqrt(2.0);

  std::vector<double> gram(static_cast<std::size_t>(m) * m, 0.0);
  std::vector<double> row(m);
  for (const PlaneFrame& w : kept) {
    SymMatrix mw(n);
    for (const Vec& col : w.basis)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) mw.add(i, j, col[i] * col[j]);
    for (int k = 0; k < m; ++k) {
      auto [i, j] = coords[k];
      row[k] = (i == j) ? mw(i, i) : sqrt2 * mw(i, j);
    }
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l) gram[static_cast<std::size_t>(k) * m + l] += row[k] * row[l];
  }
  auto eg = detail::jacobi_eigh(gram, m, true);
  // relative spectral cutoff 1e-8 on the normal-equation spectrum: the
  // Gram's eigenvalue noise floor (~1e-15 of the top) must stay below the
  // cutoff or exactly-flat directions turn into phantom constraints
  const double lam_max = std::max(eg.eigenvalues.back(), 0.0);

  FaceOracleResult out;
  out.planes_kept = static_cast<int>(kept.size());
  std::vector<SymMatrix> null_basis;
  for (int k = 0; k < m; ++k) {
    if (eg.eigenvalues[k] > 1e-8 * lam_max) continue;
    SymMatrix b(n);
    for (int c = 0; c < m; ++c) {
      auto [i, j] = coords[c];
      double coef = eg.vectors[static_cast<std::size_t>(m) * k + c];
      b.set(i, j, (i == j) ? coef : coef / sqrt2);
    }
    null_basis.push_back(std::move(b));
  }

  // The +- probe judges a direction correctly only when it does not mix
  // face components with curvature components, and face directions are
  // block-aligned in the eigenframe of A. Build the candidate basis from
  // eigenvector-pair directions that lie (almost) inside the numeric
  // nullspace, then complete it with whatever nullspace remainder is left;
  // the remainder blocks are homogeneous, so the probe stays sound on them.
  auto project_null = [&](const SymMatrix& x) {
    SymMatrix r(n);
    for (const SymMatrix& nb : null_basis) r += x.frob_dot(nb) * nb;
    return r;
  };
  SymMatrix a_hat = (1.0 / a.frob_norm()) * a;

  std::vector<SymMatrix> candidates;
  auto push_candidate = [&](SymMatrix b) {
    b -= b.frob_dot(a_hat) * a_hat;
    for (const SymMatrix& q : candidates) b -= b.frob_dot(q) * q;
    double bn = b.frob_norm();
    if (bn < 1e-6) return;
    b *= 1.0 / bn;
    candidates.push_back(std::move(b));
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      Vec vi = sp.eigenvector(i), vj = sp.eigenvector(j);
      SymMatrix d(n);
      for (int r = 0; r < n; ++r)
        for (int c = r; c < n; ++c)
          d.set(r, c, i == j ? vi[r] * vi[c] : (vi[r] * vj[c] + vj[r] * vi[c]) / sqrt2);
      SymMatrix dn = project_null(d);
      if (dn.frob_norm() < 0.9) continue;  // not (almost) flat: constrained out
      dn *= 1.0 / dn.frob_norm();
      push_candidate(std::move(dn));
    }
  }
  for (const SymMatrix& nb : null_basis) push_candidate(nb);
  out.nullspace_dim = static_cast<int>(candidates.size());

  PDegree deg(static_cast<double>(p));
  for (SymMatrix& b : candidates) {
    bool survives = true;
    for (double sgn : {1.0, -1.0}) {
      SymMatrix probe = a + (sgn * t_step) * b;
      ConeVerdict pv = is_p_positive(probe, deg, 10.0 * tol);
      if (pv.status == ConeStatus::Outside) {
        survives = false;
        break;
      }
    }
    if (survives) out.surviving.push_back(std::move(b));
  }
  out.dimension = 1 + static_cast<int>(out.surviving.size());
  return out;
}

}  // namespace pgeom
