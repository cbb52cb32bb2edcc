// pgeom: batch front end for the p-convex geometry toolkit.
//
// Subcommands:
//   cone check|derivation|riesz-char
//   riesz verify
//   field analyze|restrict
//   surface analyze|parallel|neglog
//   extreme classify|oracle
//   hull compute|nesting
//   corpus run
//
// Every report embeds the effective run configuration, the tool version and
// the seed; re-running a report's config reproduces it bit for bit. Exit
// codes: 0 success, 1 assertion-failed verdict (--assert), 2 input or usage
// error. Malformed input never crashes the process.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pgeom/io.hpp"
#include "pgeom/pgeom.hpp"

using nlohmann::json;
using namespace pgeom;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Output {
  std::string path;    // empty -> stdout
  std::string format;  // "json" or "csv"
};

void emit(const Output& out, const std::string& text) {
  if (out.path.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
  } else {
    io::write_text_file(out.path, text);
  }
}

void emit_json(const Output& out, const json& report) { emit(out, report.dump(2)); }

json verdict_json(const ConeVerdict& v) {
  return json{{"status", to_string(v.status)}, {"margin", v.margin}, {"tolerance", v.tol}};
}

json report_shell(const std::string& command, json config) {
  return json{{"tool", "pgeom"}, {"version", kVersion}, {"command", command},
              {"config", std::move(config)}};
}

Vec parse_point(const std::string& s) {
  Vec x;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) x.push_back(std::stod(item));
  if (x.empty()) throw std::invalid_argument("empty point literal");
  return x;
}

std::vector<double> parse_list(const std::string& s) { return parse_point(s); }

ImplicitSurface parse_surface(const std::string& spec) {
  if (spec.rfind("sphere:", 0) == 0) {
    double r = std::stod(spec.substr(7));
    return ImplicitSurface::sphere(3, r);
  }
  if (spec.rfind("sphere2:", 0) == 0) {  // planar variant
    double r = std::stod(spec.substr(8));
    return ImplicitSurface::sphere(2, r);
  }
  if (spec.rfind("ellipsoid:", 0) == 0) {
    Vec axes = parse_point(spec.substr(10));
    return ImplicitSurface::ellipsoid(axes);
  }
  if (spec.rfind("poly:", 0) == 0) {
    std::string path = spec.substr(5);
    int n = 0;
    auto terms = io::poly_terms_from_json(io::load_json_file(path), &n);
    ScalarField rho = polynomial_field(n, Box::cube(n, -4.0, 4.0), std::move(terms), "poly");
    return ImplicitSurface::from_field(std::move(rho), 1e-6, spec);
  }
  throw std::invalid_argument("unknown surface spec '" + spec +
                              "' (expected sphere:R, ellipsoid:a,b[,c...], poly:FILE)");
}

ScalarField parse_field(const std::string& name_or_path, int fallback_n, const Box* box_hint) {
  std::ifstream probe(name_or_path);
  if (probe.good()) {
    int n = 0;
    auto terms = io::poly_terms_from_json(io::load_json_file(name_or_path), &n);
    Box box = box_hint && box_hint->dim() == n ? *box_hint : Box::cube(n, -4.0, 4.0);
    return polynomial_field(n, box, std::move(terms), name_or_path);
  }
  Box box = box_hint && box_hint->dim() == fallback_n ? *box_hint
                                                      : Box::cube(fallback_n, -4.0, 4.0);
  return builtin_field(name_or_path, fallback_n, box);
}

// --- cone ------------------------------------------------------------------

int cmd_cone_check(const std::string& matrix_path, double p, double tol, int samples,
                   std::uint64_t seed, bool assert_mode, const Output& out) {
  SymMatrix a = io::read_matrix_file(matrix_path);
  PDegree deg(p);
  deg.require_at_most(a.n());

  ConeVerdict eigen = is_p_positive(a, deg, tol);

  // derivation route: convex interpolation of the two neighboring integer
  // degrees reproduces the fractional eigenvalue sum exactly
  double d_margin;
  if (deg.frac > 0.0)
    d_margin = (1.0 - deg.frac) * derivation_min_eig(a, deg.bar) +
               deg.frac * derivation_min_eig(a, deg.bar + 1);
  else
    d_margin = derivation_min_eig(a, deg.bar);
  ConeVerdict derivation = classify_margin(d_margin, eigen.tol);

  double g_margin;
  if (deg.frac > 0.0)
    g_margin = (1.0 - deg.frac) * grassmann_trace_min(a, deg.bar, samples, seed) +
               deg.frac * grassmann_trace_min(a, deg.bar + 1, samples, seed + 1);
  else
    g_margin = grassmann_trace_min(a, deg.bar, samples, seed);

  bool routes_agree = std::abs(eigen.margin - d_margin) <= 1e-8 * std::max(1.0, a.inf_norm());
  bool bound_holds = g_margin >= eigen.margin - 1e-10;

  json rep = report_shell("cone check", json{{"matrix", matrix_path},
                                             {"p", p},
                                             {"tol", tol},
                                             {"samples", samples},
                                             {"seed", seed},
                                             {"assert", assert_mode}});
  rep["results"] = json{{"eigen_sum", verdict_json(eigen)},
                        {"derivation_min_eig", verdict_json(derivation)},
                        {"grassmann_sampled_bound", g_margin},
                        {"routes_agree", routes_agree},
                        {"upper_bound_holds", bound_holds},
                        {"consensus", to_string(eigen.status)}};
  emit_json(out, rep);
  if (assert_mode && eigen.status == ConeStatus::Outside) return 1;
  return 0;
}

int cmd_cone_derivation(const std::string& matrix_path, double p, const Output& out) {
  SymMatrix a = io::read_matrix_file(matrix_path);
  if (p != std::floor(p)) throw std::invalid_argument("cone derivation: p must be an integer");
  int pi = static_cast<int>(p);
  if (pi < 1 || pi > a.n()) throw std::invalid_argument("cone derivation: p out of range");
  DerivationMatrix d = derivation_operator(a, pi);
  json rep = report_shell("cone derivation", json{{"matrix", matrix_path}, {"p", pi}});
  json idx = json::array();
  for (const auto& subset : d.index_map()) idx.push_back(subset);
  auto spec = d.eigenvalues_ascending();
  rep["results"] = json{{"dim", d.dim()},
                        {"index_map", idx},
                        {"eigenvalues", spec},
                        {"min_eigenvalue", spec.front()},
                        {"ordered_eigen_sum", ordered_eigen_sum(a, double(pi))}};
  emit_json(out, rep);
  return 0;
}

int cmd_cone_riesz_char(int n, const std::string& member_name, double q, double tol,
                        const Output& out) {
  if (n < 2 || n > SymMatrix::kMaxDim) throw std::invalid_argument("riesz-char: n out of range");
  std::function<bool(const SymMatrix&)> member;
  if (member_name == "pcone") {
    PDegree dq(q);
    dq.require_at_most(n);
    member = [dq](const SymMatrix& m) {
      return is_p_positive(m, dq, 1e-9).status != ConeStatus::Outside;
    };
  } else if (member_name == "psd") {
    member = [](const SymMatrix& m) { return eigenvalues(m).front() >= -1e-9; };
  } else if (member_name == "trace") {
    member = [n](const SymMatrix& m) { return m.trace() >= -1e-9 * n; };
  } else {
    throw std::invalid_argument("riesz-char: unknown member '" + member_name +
                                "' (expected pcone, psd, trace)");
  }
  double pf = riesz_characteristic(member, n, tol);
  json rep = report_shell(
      "cone riesz-char",
      json{{"n", n}, {"member", member_name}, {"q", q}, {"tol", tol}});
  rep["results"] = json{{"characteristic", pf}, {"cap", 2.0 * n}, {"capped", pf >= 2.0 * n}};
  emit_json(out, rep);
  return 0;
}

// --- riesz -----------------------------------------------------------------

int cmd_riesz_verify(double p, int n, double q, int samples, double tol, std::uint64_t seed,
                     bool assert_mode, const Output& out) {
  RieszKernel k(p, n);
  PDegree dq(q);
  dq.require_at_most(n);
  Rng rng(seed);
  double max_abs_defect = 0.0;
  double min_margin = std::numeric_limits<double>::infinity();
  int outside = 0;
  for (int s = 0; s < samples; ++s) {
    Vec x = rng.normal_vec(n);
    double nn = norm(x);
    if (nn < 1e-9) continue;
    x = (rng.uniform(0.5, 4.0) / nn) * x;
    SymMatrix h = riesz_hessian(k, x);
    double defect = p_harmonic_defect(h, dq);
    max_abs_defect = std::max(max_abs_defect, std::abs(defect));
    ConeVerdict v = is_p_positive(h, dq, kConeTol);
    min_margin = std::min(min_margin, v.margin);
    if (v.status == ConeStatus::Outside) ++outside;
  }
  bool pass = (q >= p) ? (outside == 0 && (q != p || max_abs_defect <= tol)) : false;
  json rep = report_shell("riesz verify", json{{"p", p},
                                               {"n", n},
                                               {"q", q},
                                               {"samples", samples},
                                               {"tol", tol},
                                               {"seed", seed},
                                               {"assert", assert_mode}});
  rep["results"] = json{{"max_abs_defect", max_abs_defect},
                        {"min_margin", min_margin},
                        {"outside_count", outside},
                        {"pass", pass}};
  emit_json(out, rep);
  return (assert_mode && !pass) ? 1 : 0;
}

// --- field -----------------------------------------------------------------

int cmd_field_analyze(const std::string& field_name, const std::string& points_path, double p,
                      double tol, bool assert_mode, const Output& out) {
  int n = 0;
  auto pts = io::read_points_file(points_path, &n);
  ScalarField f = parse_field(field_name, n, nullptr);
  if (f.n() != n) throw std::invalid_argument("field analyze: field/point dimension mismatch");
  auto reports = psh_report(f, pts, PDegree(p), tol);
  json rows = json::array();
  int outside = 0;
  for (const auto& r : reports) {
    json row{{"point", r.point}};
    if (r.verdict) {
      row["status"] = to_string(r.verdict->status);
      row["margin"] = r.verdict->margin;
      if (r.verdict->status == ConeStatus::Outside) ++outside;
    } else {
      row["annotation"] = r.annotation;
    }
    rows.push_back(std::move(row));
  }
  json rep = report_shell("field analyze", json{{"field", field_name},
                                                {"points", points_path},
                                                {"p", p},
                                                {"tol", tol},
                                                {"assert", assert_mode}});
  rep["results"] = json{{"points", rows}, {"outside_count", outside}};
  emit_json(out, rep);
  return (assert_mode && outside > 0) ? 1 : 0;
}

int cmd_field_restrict(const std::string& field_name, const std::string& points_path, double p,
                       int samples, std::uint64_t seed, bool assert_mode, const Output& out) {
  int n = 0;
  auto pts = io::read_points_file(points_path, &n);
  ScalarField f = parse_field(field_name, n, nullptr);
  if (p != std::floor(p) || p < 1 || p > n)
    throw std::invalid_argument("field restrict: p must be an integer plane dimension in [1, n]");
  int pdim = static_cast<int>(p);
  Rng rng(seed);
  json rows = json::array();
  double global_min = std::numeric_limits<double>::infinity();
  double worst_gap = 0.0;
  for (const Vec& base : pts) {
    double local_min = std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
      PlaneFrame w = random_plane(n, pdim, rng);
      double lap = restriction_laplacian(f, base, w, Vec(pdim, 0.0));
      double tr = trace_on_plane(fd_hessian(f, base), w);
      worst_gap = std::max(worst_gap, std::abs(lap - tr) / std::max(1.0, std::abs(tr)));
      local_min = std::min(local_min, lap);
    }
    global_min = std::min(global_min, local_min);
    rows.push_back(json{{"point", base}, {"min_laplacian", local_min}});
  }
  json rep = report_shell("field restrict", json{{"field", field_name},
                                                 {"points", points_path},
                                                 {"p", p},
                                                 {"samples", samples},
                                                 {"seed", seed},
                                                 {"assert", assert_mode}});
  rep["results"] = json{{"points", rows},
                        {"min_restriction_laplacian", global_min},
                        {"max_trace_disagreement", worst_gap}};
  emit_json(out, rep);
  return (assert_mode && global_min < -2e-4) ? 1 : 0;
}

// --- surface ---------------------------------------------------------------

int cmd_surface_analyze(const std::string& spec, const std::vector<Vec>& pts, double p, double tol,
                        bool assert_mode, const Output& out) {
  ImplicitSurface s = parse_surface(spec);
  PDegree deg(p);
  json rows = json::array();
  std::ostringstream csv;
  csv.precision(17);
  int outside = 0;
  for (int i = 0; i < s.n(); ++i) csv << "x" << i << ",";
  for (int i = 0; i + 1 < s.n(); ++i) csv << "kappa" << i << ",";
  csv << "p,verdict\n";
  for (const Vec& x : pts) {
    auto prof = principal_curvatures(s, x);
    ConeVerdict v = is_boundary_p_convex(s, x, deg, tol);
    if (v.status == ConeStatus::Outside) ++outside;
    rows.push_back(json{{"point", x},
                        {"kappas", prof.kappas},
                        {"verdict", verdict_json(v)}});
    for (double c : x) csv << c << ",";
    for (double kap : prof.kappas) csv << kap << ",";
    csv << p << "," << to_string(v.status) << "\n";
  }
  if (out.format == "csv") {
    emit(out, csv.str());
  } else {
    json rep = report_shell("surface analyze", json{{"surface", spec},
                                                    {"p", p},
                                                    {"tol", tol},
                                                    {"assert", assert_mode}});
    rep["results"] = json{{"points", rows}, {"outside_count", outside}};
    emit_json(out, rep);
  }
  return (assert_mode && outside > 0) ? 1 : 0;
}

int cmd_surface_parallel(const std::string& spec, const Vec& x, double delta, const Output& out) {
  ImplicitSurface s = parse_surface(spec);
  auto prof = principal_curvatures(s, x);
  auto moved = parallel_curvatures(prof, delta);
  json rep = report_shell("surface parallel",
                          json{{"surface", spec}, {"point", x}, {"delta", delta}});
  rep["results"] = json{{"kappas", prof.kappas},
                        {"kappas_at_delta", moved.kappas},
                        {"moved_point", moved.point}};
  emit_json(out, rep);
  return 0;
}

int cmd_surface_neglog(const std::string& spec, const Vec& x, double p, int samples,
                       std::uint64_t seed, bool assert_mode, const Output& out) {
  ImplicitSurface s = parse_surface(spec);
  if (p != std::floor(p) || p < 1 || p > s.n())
    throw std::invalid_argument("surface neglog: p must be an integer in [1, n]");
  Rng rng(seed);
  json rows = json::array();
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    PlaneFrame v = random_plane(s.n(), static_cast<int>(p), rng);
    auto r = neg_log_dist_trace(s, x, v);
    double rel = std::abs(r.value_formula - r.value_fd) /
                 std::max({1.0, std::abs(r.value_formula), std::abs(r.value_fd)});
    worst = std::max(worst, rel);
    rows.push_back(json{{"value_formula", r.value_formula},
                        {"value_fd", r.value_fd},
                        {"delta", r.delta},
                        {"cos_theta", r.cos_theta},
                        {"relative_gap", rel}});
  }
  json rep = report_shell("surface neglog", json{{"surface", spec},
                                                 {"point", x},
                                                 {"p", p},
                                                 {"samples", samples},
                                                 {"seed", seed},
                                                 {"assert", assert_mode}});
  rep["results"] = json{{"planes", rows}, {"max_relative_gap", worst}};
  emit_json(out, rep);
  return (assert_mode && worst > 1e-4) ? 1 : 0;
}

// --- extreme ---------------------------------------------------------------

int cmd_extreme_classify(const std::string& matrix_path, double p, double tol, bool assert_mode,
                         const Output& out) {
  SymMatrix a = io::read_matrix_file(matrix_path);
  RayClass rc = classify_ray(a, PDegree(p), tol);
  json rep = report_shell("extreme classify",
                          json{{"matrix", matrix_path}, {"p", p}, {"tol", tol},
                               {"assert", assert_mode}});
  json res{{"label", to_string(rc.label)},
           {"verdict", verdict_json(rc.verdict)},
           {"witness_spectrum", rc.witness_spectrum}};
  if (rc.decomposition) {
    res["decomposition"] = json{{"B", io::matrix_to_json(rc.decomposition->first)},
                                {"C", io::matrix_to_json(rc.decomposition->second)}};
  }
  rep["results"] = std::move(res);
  emit_json(out, rep);
  return (assert_mode && rc.label == RayLabel::Outside) ? 1 : 0;
}

int cmd_extreme_oracle(const std::string& matrix_path, double p, int samples, double t_step,
                       double tol, std::uint64_t seed, const Output& out) {
  SymMatrix a = io::read_matrix_file(matrix_path);
  if (p != std::floor(p)) throw std::invalid_argument("extreme oracle: p must be an integer");
  auto r = face_dimension_oracle(a, static_cast<int>(p), samples, t_step, tol, seed);
  json rep = report_shell("extreme oracle", json{{"matrix", matrix_path},
                                                 {"p", p},
                                                 {"samples", samples},
                                                 {"t_step", t_step},
                                                 {"tol", tol},
                                                 {"seed", seed}});
  rep["results"] = json{{"face_dimension", r.dimension},
                        {"extreme", r.dimension == 1},
                        {"planes_kept", r.planes_kept},
                        {"nullspace_dim", r.nullspace_dim}};
  emit_json(out, rep);
  return 0;
}

// --- hull ------------------------------------------------------------------

int cmd_hull_compute(const std::string& points_path, const std::string& grid_path, double p,
                     int poles, std::uint64_t seed, const Output& out) {
  int n = 0;
  auto k = io::read_points_file(points_path, &n);
  GridSpec grid = io::grid_from_json(io::load_json_file(grid_path));
  if (grid.dim() != n) throw std::invalid_argument("hull compute: grid/point dimension mismatch");
  if (poles < 0) poles = default_pole_count(n);
  Dictionary dict = default_dictionary(PDegree(p), grid.box, poles, seed);
  HullResult h = compute_hull(k, grid, dict);
  if (out.format == "csv") {
    emit(out, io::hull_margins_csv(h));
    return 0;
  }
  json rep = report_shell("hull compute", json{{"points", points_path},
                                               {"grid", grid_path},
                                               {"p", p},
                                               {"poles", poles},
                                               {"seed", seed}});
  rep["results"] = io::hull_to_json(h);
  rep["results"]["dictionary_entries"] = dict.entries.size();
  emit_json(out, rep);
  return 0;
}

int cmd_hull_nesting(const std::string& points_path, const std::string& grid_path,
                     const std::string& p_list_str, int poles, std::uint64_t seed,
                     bool assert_mode, const Output& out) {
  int n = 0;
  auto k = io::read_points_file(points_path, &n);
  GridSpec grid = io::grid_from_json(io::load_json_file(grid_path));
  auto p_list = parse_list(p_list_str);
  if (poles < 0) poles = default_pole_count(n);
  auto dicts = nested_dictionaries(p_list, grid.box, poles, seed);
  auto rep_data = hull_nesting_check(k, grid, p_list, dicts);
  json per_p = json::array();
  for (std::size_t i = 0; i < p_list.size(); ++i)
    per_p.push_back(json{{"p", p_list[i]}, {"inside_cells", rep_data.hulls[i].inside_count}});
  json viol = json::array();
  for (const auto& v : rep_data.violations)
    viol.push_back(json{{"cell", v.cell}, {"p_small", v.p_small}, {"p_large", v.p_large}});
  json rep = report_shell("hull nesting", json{{"points", points_path},
                                               {"grid", grid_path},
                                               {"p_list", p_list},
                                               {"poles", poles},
                                               {"seed", seed},
                                               {"assert", assert_mode}});
  rep["results"] = json{{"hulls", per_p}, {"violations", viol}, {"ok", rep_data.ok()}};
  emit_json(out, rep);
  return (assert_mode && !rep_data.ok()) ? 1 : 0;
}

// --- corpus ----------------------------------------------------------------

int cmd_corpus_run(std::uint64_t seed, bool assert_mode, const Output& out) {
  struct Check {
    std::string name;
    bool pass;
    std::string detail;
  };
  std::vector<Check> checks;
  auto add = [&](const std::string& name, bool pass, const std::string& detail) {
    checks.push_back({name, pass, detail});
  };
  Rng rng(seed);

  {  // equivalence of the eigenvalue-sum and derivation routes + sampled bound
    bool ok = true;
    std::ostringstream d;
    for (int t = 0; t < 20 && ok; ++t) {
      int n = 2 + static_cast<int>(rng.below(3));
      int p = 1 + static_cast<int>(rng.below(n));
      SymMatrix a(n);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) a.set(i, j, rng.normal());
      double sum = ordered_eigen_sum(a, double(p));
      double dmin = derivation_min_eig(a, p);
      double g = grassmann_trace_min(a, p, 400, seed + t);
      if (std::abs(sum - dmin) > 1e-8 * std::max(1.0, a.inf_norm()) || g < sum - 1e-10) {
        ok = false;
        d << "trial " << t << ": sum " << sum << " dmin " << dmin << " g " << g;
      }
    }
    add("cone-equivalence", ok, d.str());
  }
  {  // derivation spectrum = subset sums
    bool ok = true;
    for (int t = 0; t < 10 && ok; ++t) {
      int n = 3 + static_cast<int>(rng.below(2));
      int p = 2;
      SymMatrix a(n);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) a.set(i, j, rng.normal());
      auto lam = eigenvalues(a);
      auto dm = derivation_operator(a, p);
      auto ds = dm.eigenvalues_ascending();
      std::vector<double> sums;
      for (const auto& idx : dm.index_map()) {
        double ssum = 0.0;
        for (int i : idx) ssum += lam[i];
        sums.push_back(ssum);
      }
      std::sort(sums.begin(), sums.end());
      for (std::size_t i = 0; i < sums.size(); ++i)
        if (std::abs(sums[i] - ds[i]) > 1e-8 * std::max(1.0, a.inf_norm())) ok = false;
    }
    add("derivation-spectrum", ok, "");
  }
  {  // riesz kernels: p-harmonic and never outside; sharp below p
    bool ok = true;
    for (double p : {1.0, 1.5, 2.0, 2.5, 3.0}) {
      RieszKernel kk(p, 3);
      for (int t = 0; t < 10; ++t) {
        Vec x = rng.normal_vec(3);
        double nn = norm(x);
        if (nn < 1e-6) continue;
        x = (rng.uniform(0.5, 4.0) / nn) * x;
        SymMatrix h = riesz_hessian(kk, x);
        if (std::abs(p_harmonic_defect(h, p)) > 1e-9) ok = false;
        if (is_p_positive(h, p).status == ConeStatus::Outside) ok = false;
        if (p > 1.26 && is_p_positive(h, p - 0.25).status != ConeStatus::Outside) ok = false;
      }
    }
    add("riesz-harmonic-sharp", ok, "");
  }
  {  // hodge dual identity
    bool ok = true;
    for (int t = 0; t < 20; ++t) {
      int n = 2 + static_cast<int>(rng.below(4));
      SymMatrix a(n);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) a.set(i, j, rng.normal());
      double lmin = eigenvalues(hodge_dual_form(a)).front();
      if (std::abs(lmin - ordered_eigen_sum(a, double(n - 1))) >
          1e-8 * std::max(1.0, a.inf_norm()))
        ok = false;
    }
    add("hodge-dual", ok, "");
  }
  {  // riesz characteristic of P_2 in R^4
    auto member = [](const SymMatrix& m) {
      return is_p_positive(m, 2.0, 1e-9).status != ConeStatus::Outside;
    };
    double pf = riesz_characteristic(member, 4, 1e-7);
    add("riesz-characteristic", std::abs(pf - 2.0) <= 1e-6, "got " + std::to_string(pf));
  }
  {  // sphere curvature
    auto s = ImplicitSurface::sphere(3, 2.0);
    auto prof = principal_curvatures(s, {0.0, 2.0, 0.0});
    bool ok = std::abs(prof.kappas[0] - 0.5) <= 1e-8 && std::abs(prof.kappas[1] - 0.5) <= 1e-8;
    auto moved = parallel_curvatures(prof, 1.0);
    ok = ok && std::abs(moved.kappas[0] - 1.0) <= 1e-8;
    add("sphere-curvature", ok, "");
  }
  {  // worked -log delta ball values
    auto s = ImplicitSurface::sphere(3, 1.0);
    PlaneFrame tangential(3, {unit_vector(3, 1), unit_vector(3, 2)});
    auto r = neg_log_dist_trace(s, {0.5, 0.0, 0.0}, tangential);
    bool ok = std::abs(r.value_formula - 8.0) <= 1e-9 && std::abs(r.value_fd - 8.0) <= 1e-6;
    add("neglog-ball", ok, "");
  }
  {  // extreme patterns
    bool ok = classify_ray(SymMatrix::diagonal({-2, 1, 1, 1}), PDegree(3.0)).label ==
              RayLabel::ExtremeNegEig;
    ok = ok && classify_ray(SymMatrix::diagonal({1, 0, 0, 0}), PDegree(2.0)).label ==
                   RayLabel::ExtremeProjection;
    ok = ok && classify_ray(SymMatrix::diagonal({1, 0, 0}), PDegree(2.0)).label ==
                   RayLabel::BoundaryNotExtreme;
    add("extreme-patterns", ok, "");
  }
  {  // hull of a grid-aligned square at p=1
    Box box = Box::cube(2, -1.0, 1.0);
    GridSpec grid(box, {64, 64});
    double v = -1.0 + 13.5 * grid.cell_width(0);
    std::vector<Vec> k{{v, v}, {-v, v}, {v, -v}, {-v, -v}};
    Dictionary dict = default_dictionary(PDegree(1.0), box, 0, seed);
    HullResult h = compute_hull(k, grid, dict);
    std::size_t oracle = 0;
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
      Vec x = grid.center(c);
      if (std::abs(x[0]) <= std::abs(v) + 1e-12 && std::abs(x[1]) <= std::abs(v) + 1e-12) ++oracle;
    }
    double relgap = std::abs(double(h.inside_count) - double(oracle)) / double(oracle);
    add("hull-square", relgap <= 0.02,
        "mask " + std::to_string(h.inside_count) + " oracle " + std::to_string(oracle));
  }

  json rows = json::array();
  bool all = true;
  for (const auto& c : checks) {
    rows.push_back(json{{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    all = all && c.pass;
  }
  json rep = report_shell("corpus run", json{{"seed", seed}, {"assert", assert_mode}});
  rep["results"] = json{{"checks", rows}, {"all_pass", all}};
  emit_json(out, rep);
  return (assert_mode && !all) ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pgeom: numerical toolkit for p-convex geometry"};
  app.require_subcommand(1);

  // shared option storage
  std::string matrix_path, field_name, surface_spec, points_path, grid_path, point_str;
  std::string member = "pcone", p_list = "1,2", out_path, format = "json";
  double p = 2.0, q = 2.0, tol = 1e-8, delta = 0.0, t_step = 1e-3;
  int n = 3, samples = 100, poles = -1;
  std::uint64_t seed = 0;
  bool assert_mode = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_path, "write the report to a file instead of stdout");
    cmd->add_option("--format", format, "output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_flag("--assert", assert_mode, "exit 1 when the checked property fails");
  };

  auto* cone = app.add_subcommand("cone", "cone membership and structure");
  auto* cone_check = cone->add_subcommand("check", "three-route membership check");
  cone_check->add_option("--matrix", matrix_path, "matrix JSON file")->required();
  cone_check->add_option("--p", p, "degree p")->required();
  cone_check->add_option("--tol", tol, "boundary tolerance (relative)");
  cone_check->add_option("--samples", samples, "Grassmann samples");
  cone_check->add_option("--seed", seed, "sampling seed");
  add_common(cone_check);

  auto* cone_deriv = cone->add_subcommand("derivation", "derivation operator on Lambda^p");
  cone_deriv->add_option("--matrix", matrix_path)->required();
  cone_deriv->add_option("--p", p)->required();
  add_common(cone_deriv);

  auto* cone_char = cone->add_subcommand("riesz-char", "Riesz characteristic of a membership");
  cone_char->add_option("--n", n, "ambient dimension")->required();
  cone_char->add_option("--member", member, "membership family: pcone, psd, trace");
  cone_char->add_option("--q", q, "degree for the pcone membership");
  cone_char->add_option("--tol", tol, "bisection width");
  add_common(cone_char);

  auto* riesz = app.add_subcommand("riesz", "Riesz kernel verification");
  auto* riesz_verify = riesz->add_subcommand("verify", "p-harmonicity and membership sweep");
  riesz_verify->add_option("--p", p)->required();
  riesz_verify->add_option("--n", n)->required();
  riesz_verify->add_option("--q", q, "degree to test against (default: p)");
  riesz_verify->add_option("--samples", samples);
  riesz_verify->add_option("--tol", tol, "defect tolerance");
  riesz_verify->add_option("--seed", seed);
  add_common(riesz_verify);

  auto* field = app.add_subcommand("field", "scalar field analysis");
  auto* field_analyze = field->add_subcommand("analyze", "pointwise psh verdicts");
  field_analyze->add_option("--field", field_name, "field file or builtin name")->required();
  field_analyze->add_option("--points", points_path, "points JSON file")->required();
  field_analyze->add_option("--p", p)->required();
  field_analyze->add_option("--tol", tol);
  add_common(field_analyze);

  auto* field_restrict = field->add_subcommand("restrict", "restriction laplacians on planes");
  field_restrict->add_option("--field", field_name)->required();
  field_restrict->add_option("--points", points_path)->required();
  field_restrict->add_option("--p", p, "plane dimension")->required();
  field_restrict->add_option("--samples", samples);
  field_restrict->add_option("--seed", seed);
  add_common(field_restrict);

  auto* surface = app.add_subcommand("surface", "implicit hypersurface analysis");
  auto* surf_analyze = surface->add_subcommand("analyze", "curvatures and p-convexity");
  surf_analyze->add_option("--surface", surface_spec)->required();
  surf_analyze->add_option("--point", point_str, "single boundary point x1,x2,...");
  surf_analyze->add_option("--points", points_path, "boundary points JSON file");
  surf_analyze->add_option("--p", p)->required();
  surf_analyze->add_option("--tol", tol);
  add_common(surf_analyze);

  auto* surf_parallel = surface->add_subcommand("parallel", "parallel-surface curvatures");
  surf_parallel->add_option("--surface", surface_spec)->required();
  surf_parallel->add_option("--point", point_str)->required();
  surf_parallel->add_option("--delta", delta, "inward distance")->required();
  add_common(surf_parallel);

  auto* surf_neglog = surface->add_subcommand("neglog", "-log(distance) trace cross-check");
  surf_neglog->add_option("--surface", surface_spec)->required();
  surf_neglog->add_option("--point", point_str, "interior point")->required();
  surf_neglog->add_option("--p", p, "plane dimension")->required();
  surf_neglog->add_option("--samples", samples);
  surf_neglog->add_option("--seed", seed);
  add_common(surf_neglog);

  auto* extreme = app.add_subcommand("extreme", "extreme-ray analysis");
  auto* ext_classify = extreme->add_subcommand("classify", "spectral ray classification");
  ext_classify->add_option("--matrix", matrix_path)->required();
  ext_classify->add_option("--p", p)->required();
  ext_classify->add_option("--tol", tol, "boundary tolerance");
  add_common(ext_classify);

  auto* ext_oracle = extreme->add_subcommand("oracle", "face-dimension probe");
  ext_oracle->add_option("--matrix", matrix_path)->required();
  ext_oracle->add_option("--p", p)->required();
  ext_oracle->add_option("--samples", samples, "plane samples");
  ext_oracle->add_option("--t-step", t_step, "probe step");
  ext_oracle->add_option("--tol", tol);
  ext_oracle->add_option("--seed", seed);
  add_common(ext_oracle);

  auto* hull = app.add_subcommand("hull", "dictionary hull approximation");
  auto* hull_compute = hull->add_subcommand("compute", "outer hull mask over a grid");
  hull_compute->add_option("--points", points_path)->required();
  hull_compute->add_option("--grid", grid_path)->required();
  hull_compute->add_option("--p", p)->required();
  hull_compute->add_option("--poles", poles, "kernel translates (default 8n^2)");
  hull_compute->add_option("--seed", seed);
  add_common(hull_compute);

  auto* hull_nesting = hull->add_subcommand("nesting", "mask nesting over ascending p");
  hull_nesting->add_option("--points", points_path)->required();
  hull_nesting->add_option("--grid", grid_path)->required();
  hull_nesting->add_option("--p-list", p_list, "ascending degrees, e.g. 1,2,3");
  hull_nesting->add_option("--poles", poles);
  hull_nesting->add_option("--seed", seed);
  add_common(hull_nesting);

  auto* corpus = app.add_subcommand("corpus", "regression corpus");
  auto* corpus_run = corpus->add_subcommand("run", "run the built-in regression checks");
  corpus_run->add_option("--seed", seed);
  add_common(corpus_run);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  Output out{out_path, format};
  try {
    if (cone_check->parsed()) return cmd_cone_check(matrix_path, p, tol, samples, seed, assert_mode, out);
    if (cone_deriv->parsed()) return cmd_cone_derivation(matrix_path, p, out);
    if (cone_char->parsed())
      return cmd_cone_riesz_char(n, member, q, cone_char->count("--tol") ? tol : 1e-7, out);
    if (riesz_verify->parsed())
      return cmd_riesz_verify(p, n, riesz_verify->count("--q") ? q : p, samples,
                              riesz_verify->count("--tol") ? tol : 1e-9, seed, assert_mode, out);
    if (field_analyze->parsed())
      return cmd_field_analyze(field_name, points_path, p, tol, assert_mode, out);
    if (field_restrict->parsed())
      return cmd_field_restrict(field_name, points_path, p, samples, seed, assert_mode, out);
    if (surf_analyze->parsed()) {
      std::vector<Vec> pts;
      if (!point_str.empty()) pts.push_back(parse_point(point_str));
      if (!points_path.empty()) {
        int pn = 0;
        for (auto& x : io::read_points_file(points_path, &pn)) pts.push_back(std::move(x));
      }
      if (pts.empty())
        throw std::invalid_argument("surface analyze: need --point or --points");
      return cmd_surface_analyze(surface_spec, pts, p, tol, assert_mode, out);
    }
    if (surf_parallel->parsed())
      return cmd_surface_parallel(surface_spec, parse_point(point_str), delta, out);
    if (surf_neglog->parsed())
      return cmd_surface_neglog(surface_spec, parse_point(point_str), p, samples, seed,
                                assert_mode, out);
    if (ext_classify->parsed())
      return cmd_extreme_classify(matrix_path, p, ext_classify->count("--tol") ? tol : 1e-6,
                                  assert_mode, out);
    if (ext_oracle->parsed())
      return cmd_extreme_oracle(matrix_path, p, ext_oracle->count("--samples") ? samples : 200,
                                t_step, tol, seed, out);
    if (hull_compute->parsed())
      return cmd_hull_compute(points_path, grid_path, p, poles, seed, out);
    if (hull_nesting->parsed())
      return cmd_hull_nesting(points_path, grid_path, p_list, poles, seed, assert_mode, out);
    if (corpus_run->parsed()) return cmd_corpus_run(seed, assert_mode, out);
    std::cerr << "pgeom: no subcommand selected\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "pgeom: " << e.what() << "\n";
    return 2;
  }
}
