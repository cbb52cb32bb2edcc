#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pgeom/core.hpp"
#include "pgeom/fields.hpp"
#include "pgeom/pcone.hpp"
#include "pgeom/riesz.hpp"
#include "pgeom/spectra.hpp"

namespace pgeom {

/// Rectangular evaluation grid over a box; cells are addressed by their
/// centers in row-major order.
struct GridSpec {
  Box box;
  std::vector<int> res;

  GridSpec() = default;
  GridSpec(Box b, std::vector<int> r) : box(std::move(b)), res(std::move(r)) {
    if (static_cast<int>(res.size()) != box.dim())
      throw std::invalid_argument("GridSpec: resolution list must match box dimension");
    for (int v : res)
      if (v < 2) throw std::invalid_argument("GridSpec: need resolution >= 2 per axis");
  }

  int dim() const { return box.dim(); }

  std::size_t cell_count() const {
    std::size_t c = 1;
    for (int v : res) c *= static_cast<std::size_t>(v);
    return c;
  }

  double cell_width(int axis) const { return box.extent(axis) / res[axis]; }

  double max_cell_extent() const {
    double m = 0.0;
    for (int i = 0; i < dim(); ++i) m = std::max(m, cell_width(i));
    return m;
  }

  Vec center(std::size_t flat) const {
    Vec x(dim());
    for (int i = dim() - 1; i >= 0; --i) {
      std::size_t r = static_cast<std::size_t>(res[i]);
      std::size_t k = flat % r;
      flat /= r;
      x[i] = box.lo[i] + (static_cast<double>(k) + 0.5) * cell_width(i);
    }
    return x;
  }

  std::size_t flat_index(const Vec& x) const {
    std::size_t flat = 0;
    for (int i = 0; i < dim(); ++i) {
      if (x[i] < box.lo[i] || x[i] > box.hi[i])
        throw std::invalid_argument("GridSpec: point outside the grid box");
      auto k = static_cast<long long>((x[i] - box.lo[i]) / cell_width(i));
      k = std::clamp<long long>(k, 0, res[i] - 1);
      flat = flat * static_cast<std::size_t>(res[i]) + static_cast<std::size_t>(k);
    }
    return flat;
  }
};

enum class DictProvenance { Affine, ConvexQuadratic, RieszTranslate };

inline const char* to_string(DictProvenance p) {
  switch (p) {
    case DictProvenance::Affine: return "affine";
    case DictProvenance::ConvexQuadratic: return "convex-quadratic";
    default: return "riesz-translate";
  }
}

struct DictEntry {
  ScalarField field;
  DictProvenance provenance;
  std::string id;  // stable identity, used by the nesting checks
};

/// A finite family of certified smooth p-plurisubharmonic functions on an
/// ambient box X. Certification sweeps a 5^n grid and requires a verdict
/// != outside at every node; riesz-translate poles sit strictly outside X.
struct Dictionary {
  PDegree p;
  Box box;
  std::vector<DictEntry> entries;
};

/// Inset 5-per-axis certification lattice (cell centers of a 5-division, so
/// FD stencils stay inside the box).
inline std::vector<Vec> certification_grid(const Box& box) {
  const int n = box.dim();
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= 5;
  std::vector<Vec> pts;
  pts.reserve(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    Vec x(n);
    std::size_t f = flat;
    for (int i = n - 1; i >= 0; --i) {
      std::size_t k = f % 5;
      f /= 5;
      x[i] = box.lo[i] + (static_cast<double>(k) + 0.5) * box.extent(i) / 5.0;
    }
    pts.push_back(std::move(x));
  }
  return pts;
}

/// FD certification tolerance: loose enough to absorb second-difference
/// noise on boundary-of-cone entries (the kernel translates are p-harmonic,
/// so their true margin is exactly zero).
inline constexpr double kCertifyTol = 1e-5;

inline void certify_entry(const DictEntry& e, const PDegree& p, const Box& box) {
  auto reports = psh_report(e.field, certification_grid(box), p, kCertifyTol);
  for (const auto& r : reports) {
    if (!r.annotation.empty())
      throw std::runtime_error("dictionary entry " + e.id + " certification: " + r.annotation);
    if (r.verdict->status == ConeStatus::Outside) {
      std::ostringstream msg;
      msg << "dictionary entry " << e.id << " failed certification (margin " << r.verdict->margin
          << " at a grid node)";
      throw std::runtime_error(msg.str());
    }
  }
}

namespace detail {

/// 2n^2 affine directions: +-e_i and (+-e_i +- e_j)/sqrt(2).
inline std::vector<Vec> affine_direction_net(int n) {
  std::vector<Vec> dirs;
  for (int i = 0; i < n; ++i) {
    Vec d(n, 0.0);
    d[i] = 1.0;
    dirs.push_back(d);
    d[i] = -1.0;
    dirs.push_back(d);
  }
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (double si : {1.0, -1.0})
        for (double sj : {1.0, -1.0}) {
          Vec d(n, 0.0);
          d[i] = si * s;
          d[j] = sj * s;
          dirs.push_back(d);
        }
  return dirs;
}

/// n^2 quadratic centers on a deterministic Kronecker lattice in the box.
inline std::vector<Vec> quadratic_center_net(int n, const Box& box) {
  static constexpr double kAlpha[16] = {
      0.6180339887498949, 0.7548776662466927, 0.8191725133961645, 0.8566748838545029,
      0.8812714616335695, 0.8986537126286993, 0.9115923534820549, 0.9215993196339830,
      0.9295701282320229, 0.9360691110777584, 0.9414696173216353, 0.9460285282856136,
      0.9499283999636613, 0.9533025374016641, 0.9562505576379644, 0.9588484012400714};
  std::vector<Vec> centers;
  for (int k = 1; k <= n * n; ++k) {
    Vec c(n);
    for (int i = 0; i < n; ++i) {
      double t = std::fmod(static_cast<double>(k) * kAlpha[i], 1.0);
      c[i] = box.lo[i] + (0.1 + 0.8 * t) * box.extent(i);
    }
    centers.push_back(std::move(c));
  }
  return centers;
}

}  // namespace detail

/// Affine net + convex quadratics + pole_count Riesz-kernel translates with
/// poles placed outside the box (offset 0.25 * max extent beyond a face,
/// comfortably past the 0.1 * diam safety margin). Every entry is certified
/// before the dictionary is returned.
inline Dictionary default_dictionary(const PDegree& p, const Box& box, int pole_count,
                                     std::uint64_t seed) {
  if (pole_count < 0) throw std::invalid_argument("default_dictionary: pole_count must be >= 0");
  const int n = box.dim();
  Dictionary dict{p, box, {}};

  int idx = 0;
  for (const Vec& d : detail::affine_direction_net(n)) {
    std::vector<PolyTerm> terms;
    for (int i = 0; i < n; ++i) {
      if (d[i] == 0.0) continue;
      PolyTerm t;
      t.coef = d[i];
      t.powers.assign(n, 0);
      t.powers[i] = 1;
      terms.push_back(t);
    }
    std::ostringstream id;
    id << "affine:" << idx++;
    dict.entries.push_back(
        {polynomial_field(n, box, std::move(terms), id.str()), DictProvenance::Affine, id.str()});
  }

  idx = 0;
  for (const Vec& c : detail::quadratic_center_net(n, box)) {
    std::vector<PolyTerm> terms;
    double c2 = 0.0;
    for (int i = 0; i < n; ++i) {
      PolyTerm sq;
      sq.coef = 1.0;
      sq.powers.assign(n, 0);
      sq.powers[i] = 2;
      terms.push_back(sq);
      PolyTerm lin;
      lin.coef = -2.0 * c[i];
      lin.powers.assign(n, 0);
      lin.powers[i] = 1;
      terms.push_back(lin);
      c2 += c[i] * c[i];
    }
    PolyTerm cst;
    cst.coef = c2;
    cst.powers.assign(n, 0);
    terms.push_back(cst);
    std::ostringstream id;
    id << "quad:" << idx++;
    dict.entries.push_back({polynomial_field(n, box, std::move(terms), id.str()),
                            DictProvenance::ConvexQuadratic, id.str()});
  }

  Rng rng(seed);
  const double offset = 0.25 * box.max_extent();
  for (int k = 0; k < pole_count; ++k) {
    int face_axis = k % n;
    bool positive_side = (k / n) % 2 == 0;
    Vec pole = rng.point_in_box(box, 0.0);
    pole[face_axis] = positive_side ? box.hi[face_axis] + offset : box.lo[face_axis] - offset;
    std::ostringstream id;
    id << "rieszK:p=" << p.p << ":" << k;
    dict.entries.push_back({riesz_translate_field(p, n, box, pole, id.str()),
                            DictProvenance::RieszTranslate, id.str()});
  }

  for (const auto& e : dict.entries) certify_entry(e, p, box);
  return dict;
}

inline int default_pole_count(int n) { return 8 * n * n; }  // 4n per face, 2n faces

/// Nested dictionaries for an ascending degree list: shared affine/quadratic
/// base plus kernel translates of every degree <= the dictionary's own, so
/// each dictionary contains its predecessors.
inline std::vector<Dictionary> nested_dictionaries(const std::vector<double>& p_list,
                                                   const Box& box, int pole_count,
                                                   std::uint64_t seed) {
  for (std::size_t i = 1; i < p_list.size(); ++i)
    if (!(p_list[i] > p_list[i - 1]))
      throw std::invalid_argument("nested_dictionaries: p_list must be strictly ascending");
  std::vector<Dictionary> dicts;
  for (std::size_t i = 0; i < p_list.size(); ++i) {
    Dictionary d = default_dictionary(PDegree(p_list[i]), box, 0, seed);
    for (std::size_t j = 0; j <= i; ++j) {
      Dictionary kernels = default_dictionary(PDegree(p_list[j]), box, pole_count, seed);
      for (auto& e : kernels.entries)
        if (e.provenance == DictProvenance::RieszTranslate) {
          certify_entry(e, PDegree(p_list[i]), box);  // re-certify at the larger degree
          d.entries.push_back(std::move(e));
        }
    }
    dicts.push_back(std::move(d));
  }
  return dicts;
}

/// Outer approximation of the p-convex hull of K over a grid: a cell center
/// x stays in the mask iff u(x) <= max_K u + 1e-9 for every entry u, where K
/// is snapped to the centers of its containing cells (which keeps the stated
/// invariant that K-cells are always inside). More entries => smaller mask.
struct HullResult {
  GridSpec grid;
  std::vector<std::uint8_t> mask;
  std::vector<double> margin;  // min over entries of (sup_K u - u(x))
  std::size_t inside_count = 0;
};

inline constexpr double kHullSlack = 1e-9;

inline HullResult compute_hull(const std::vector<Vec>& k_points, const GridSpec& grid,
                               const Dictionary& dict) {
  if (k_points.empty()) throw std::invalid_argument("compute_hull: K must be nonempty");
  if (grid.dim() != dict.box.dim()) throw std::invalid_argument("compute_hull: dimension mismatch");
  for (const Vec& x : k_points)
    if (!grid.box.contains(x) && grid.box.distance(x) > 0.0)
      throw std::invalid_argument("compute_hull: K point outside the grid box");

  // snap K to its containing cell centers (deduplicated)
  std::set<std::size_t> k_cells;
  for (const Vec& x : k_points) k_cells.insert(grid.flat_index(x));
  std::vector<Vec> snapped;
  snapped.reserve(k_cells.size());
  for (std::size_t c : k_cells) snapped.push_back(grid.center(c));

  const std::size_t cells = grid.cell_count();
  HullResult out;
  out.grid = grid;
  out.margin.assign(cells, std::numeric_limits<double>::infinity());

  for (const DictEntry& e : dict.entries) {
    double sup_k = -std::numeric_limits<double>::infinity();
    for (const Vec& x : snapped) sup_k = std::max(sup_k, e.field.value(x));
    for (std::size_t c = 0; c < cells; ++c) {
      double m = sup_k - e.field.value(grid.center(c));
      if (m < out.margin[c]) out.margin[c] = m;
    }
  }

  out.mask.assign(cells, 0);
  for (std::size_t c = 0; c < cells; ++c)
    if (out.margin[c] >= -kHullSlack) {
      out.mask[c] = 1;
      ++out.inside_count;
    }
  return out;
}

struct NestingViolation {
  std::size_t cell;
  double p_small, p_large;
};

struct NestingReport {
  std::vector<HullResult> hulls;  // aligned with p_list
  std::vector<NestingViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Hull masks shrink as p grows when the dictionaries are nested; any
/// violation is an implementation bug and is enumerated cellwise.
inline NestingReport hull_nesting_check(const std::vector<Vec>& k_points, const GridSpec& grid,
                                        const std::vector<double>& p_list,
                                        const std::vector<Dictionary>& dicts) {
  if (p_list.size() != dicts.size())
    throw std::invalid_argument("hull_nesting_check: p_list and dictionaries must align");
  for (std::size_t i = 1; i < p_list.size(); ++i)
    if (!(p_list[i] > p_list[i - 1]))
      throw std::invalid_argument("hull_nesting_check: p_list must be strictly ascending");

  // nesting of the dictionaries themselves, by entry identity
  for (std::size_t i = 1; i < dicts.size(); ++i) {
    std::set<std::string> larger;
    for (const auto& e : dicts[i].entries) larger.insert(e.id);
    for (const auto& e : dicts[i - 1].entries)
      if (!larger.count(e.id))
        throw std::invalid_argument("hull_nesting_check: dictionaries are not nested (missing " +
                                    e.id + ")");
  }

  NestingReport rep;
  for (const auto& d : dicts) rep.hulls.push_back(compute_hull(k_points, grid, d));
  for (std::size_t i = 1; i < rep.hulls.size(); ++i)
    for (std::size_t c = 0; c < rep.hulls[i].mask.size(); ++c)
      if (rep.hulls[i].mask[c] && !rep.hulls[i - 1].mask[c])
        rep.violations.push_back({c, p_list[i - 1], p_list[i]});
  return rep;
}

}  // namespace pgeom
