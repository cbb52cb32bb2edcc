#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pgeom/core.hpp"
#include "pgeom/fields.hpp"
#include "pgeom/hull.hpp"
#include "pgeom/sym_matrix.hpp"

namespace pgeom::io {

using nlohmann::json;

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

/// Matrix file: {"n": int, "upper": [n(n+1)/2 reals]} (row-major upper).
inline SymMatrix matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("upper"))
    throw std::invalid_argument("matrix file: expected {\"n\": int, \"upper\": [...]}");
  int n = j.at("n").get<int>();
  if (n < 2 || n > SymMatrix::kMaxDim)
    throw std::invalid_argument("matrix file: n must be in [2, 16]");
  auto upper = j.at("upper").get<std::vector<double>>();
  return SymMatrix::from_upper(n, std::move(upper));
}

inline SymMatrix read_matrix_file(const std::string& path) {
  return matrix_from_json(load_json_file(path));
}

inline json matrix_to_json(const SymMatrix& a) {
  return json{{"n", a.n()}, {"upper", a.upper()}};
}

/// Point-set file: {"n": int, "points": [[reals]]}.
inline std::vector<Vec> points_from_json(const json& j, int* n_out = nullptr) {
  if (!j.is_object() || !j.contains("n") || !j.contains("points"))
    throw std::invalid_argument("point file: expected {\"n\": int, \"points\": [[...]]}");
  int n = j.at("n").get<int>();
  auto pts = j.at("points").get<std::vector<Vec>>();
  for (const Vec& p : pts) {
    if (static_cast<int>(p.size()) != n)
      throw std::invalid_argument("point file: a point has the wrong dimension");
    if (!all_finite(p)) throw std::invalid_argument("point file: non-finite coordinate");
  }
  if (n_out) *n_out = n;
  return pts;
}

inline std::vector<Vec> read_points_file(const std::string& path, int* n_out = nullptr) {
  return points_from_json(load_json_file(path), n_out);
}

/// Grid spec: {"box": [[lo, hi], ...], "res": [ints]}.
inline GridSpec grid_from_json(const json& j) {
  if (!j.is_object() || !j.contains("box") || !j.contains("res"))
    throw std::invalid_argument("grid spec: expected {\"box\": [[lo,hi]...], \"res\": [...]}");
  auto bounds = j.at("box").get<std::vector<std::vector<double>>>();
  Vec lo, hi;
  for (const auto& b : bounds) {
    if (b.size() != 2) throw std::invalid_argument("grid spec: each box entry must be [lo, hi]");
    lo.push_back(b[0]);
    hi.push_back(b[1]);
  }
  return GridSpec(Box(std::move(lo), std::move(hi)), j.at("res").get<std::vector<int>>());
}

inline json grid_to_json(const GridSpec& g) {
  std::vector<std::vector<double>> bounds;
  for (int i = 0; i < g.dim(); ++i) bounds.push_back({g.box.lo[i], g.box.hi[i]});
  return json{{"box", bounds}, {"res", g.res}};
}

/// Polynomial field file: {"n": int, "terms": [{"coef": real, "powers": [ints]}]}.
inline std::vector<PolyTerm> poly_terms_from_json(const json& j, int* n_out = nullptr) {
  if (!j.is_object() || !j.contains("n") || !j.contains("terms"))
    throw std::invalid_argument("field file: expected {\"n\": int, \"terms\": [...]}");
  int n = j.at("n").get<int>();
  std::vector<PolyTerm> terms;
  for (const auto& t : j.at("terms")) {
    PolyTerm term;
    term.coef = t.at("coef").get<double>();
    term.powers = t.at("powers").get<std::vector<int>>();
    if (static_cast<int>(term.powers.size()) != n)
      throw std::invalid_argument("field file: a term's powers list has the wrong length");
    terms.push_back(std::move(term));
  }
  if (n_out) *n_out = n;
  return terms;
}

/// Hull result with the mask run-length encoded over row-major cells:
/// "rle": [[value, count], ...].
inline json hull_to_json(const HullResult& h) {
  std::vector<std::pair<int, std::size_t>> rle;
  for (std::size_t c = 0; c < h.mask.size(); ++c) {
    int v = h.mask[c];
    if (!rle.empty() && rle.back().first == v)
      ++rle.back().second;
    else
      rle.emplace_back(v, 1);
  }
  json runs = json::array();
  for (const auto& [v, cnt] : rle) runs.push_back(json::array({v, cnt}));
  return json{{"grid", grid_to_json(h.grid)},
              {"inside_cells", h.inside_count},
              {"rle", runs}};
}

inline std::string hull_margins_csv(const HullResult& h) {
  std::ostringstream out;
  out.precision(17);
  const int n = h.grid.dim();
  for (int i = 0; i < n; ++i) out << "x" << i << ",";
  out << "mask,margin\n";
  for (std::size_t c = 0; c < h.mask.size(); ++c) {
    Vec x = h.grid.center(c);
    for (int i = 0; i < n; ++i) out << x[i] << ",";
    out << int(h.mask[c]) << "," << h.margin[c] << "\n";
  }
  return out.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  out << content;
}

}  // namespace pgeom::io
