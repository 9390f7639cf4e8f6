#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "hypcert/analysis/classify.hpp"
#include "hypcert/error.hpp"
#include "hypcert/metric/gromov.hpp"
#include "hypcert/metric/packing.hpp"
#include "hypcert/metric/sampled_space.hpp"
#include "hypcert/model/free_tree.hpp"
#include "hypcert/model/h2.hpp"
#include "hypcert/model/metric_graph.hpp"
#include "hypcert/pingpong/pingpong.hpp"
#include "hypcert/word.hpp"

namespace hypcert::io {

using json = nlohmann::ordered_json;

inline constexpr const char* toolkit_version = "hypcert 0.1.0";

/// Round to 12 significant digits; non-finite values become strings.
inline json num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0) return 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.11e", x);
  return std::strtod(buf, nullptr);
}

template <class T>
json opt_num(const std::optional<T>& x) {
  if (!x) return nullptr;
  return num(static_cast<double>(*x));
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw input_error("malformed JSON in '" + path + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Reading

namespace detail {

inline const json& field(const json& j, const char* key, const char* where) {
  if (!j.is_object() || !j.contains(key)) throw input_error(std::string(where) + " is missing '" + key + "'");
  return j.at(key);
}

inline double get_double(const json& j, const char* what) {
  if (!j.is_number()) throw input_error(std::string(what) + " must be a number");
  return j.get<double>();
}

inline int get_int(const json& j, const char* what) {
  if (!j.is_number_integer()) throw input_error(std::string(what) + " must be an integer");
  return j.get<int>();
}

}  // namespace detail

inline sampled_space parse_sampled_space(const json& j) {
  const auto& pts = detail::field(j, "points", "space");
  const auto& dist = detail::field(j, "dist", "space");
  if (!pts.is_array() || !dist.is_array()) throw input_error("space points and dist must be arrays");
  std::vector<std::string> ids;
  for (const auto& p : pts) {
    if (!p.is_string()) throw input_error("point ids must be strings");
    ids.push_back(p.get<std::string>());
  }
  const std::size_t n = ids.size();
  if (dist.size() != n) throw input_error("dist must have one row per point");
  std::vector<double> m;
  m.reserve(n * n);
  for (const auto& row : dist) {
    if (!row.is_array() || row.size() != n) throw input_error("dist rows must have one entry per point");
    for (const auto& v : row) m.push_back(detail::get_double(v, "distance"));
  }
  std::optional<std::string> prov;
  if (j.contains("provenance") && j["provenance"].is_string()) prov = j["provenance"].get<std::string>();
  return sampled_space(std::move(ids), std::move(m), std::move(prov));
}

inline json sampled_space_json(const sampled_space& s) {
  json j;
  j["points"] = s.ids();
  json rows = json::array();
  for (std::size_t i = 0; i < s.size(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < s.size(); ++k) row.push_back(num(s.d(i, k)));
    rows.push_back(row);
  }
  j["dist"] = rows;
  if (s.provenance()) j["provenance"] = *s.provenance();
  return j;
}

inline graph::metric_graph parse_graph(const json& params) {
  if (params.contains("family")) {
    auto fam = params["family"].get<std::string>();
    int n = detail::get_int(detail::field(params, "n", "graph family"), "n");
    if (fam == "grid") return graph::grid(n);
    if (fam == "cycle") return graph::cycle(n);
    if (fam == "random") {
      double p = params.value("extra_edge_prob", 0.1);
      auto seed = params.value("seed", std::uint64_t{1});
      return graph::random_graph(n, p, seed);
    }
    throw input_error("unknown graph family '" + fam + "'");
  }
  int n = detail::get_int(detail::field(params, "vertices", "graph params"), "vertices");
  std::vector<graph::edge> edges;
  for (const auto& e : detail::field(params, "edges", "graph params")) {
    if (!e.is_array() || e.size() < 2 || e.size() > 3) throw input_error("edges are [u, v] or [u, v, w]");
    double w = e.size() == 3 ? detail::get_double(e[2], "edge weight") : 1.0;
    edges.push_back({detail::get_int(e[0], "edge endpoint"), detail::get_int(e[1], "edge endpoint"), w});
  }
  return graph::metric_graph(n, std::move(edges));
}

/// Group description: model, params, generators, optional sample block.
struct group_input {
  std::string model;
  std::vector<std::string> names;
  std::vector<h2::moebius> h2_gens;
  ftree::free_tree tree{};
  std::vector<word> tree_gens;
  graph::metric_graph graph_space{};
  std::vector<std::vector<int>> graph_gens;
  json sample;  // null when absent
  json echo;    // generators as given

  std::size_t size() const { return names.size(); }
};

inline group_input parse_group_input(const json& j) {
  group_input g;
  g.model = detail::field(j, "model", "group description").get<std::string>();
  json params = j.value("params", json::object());
  if (g.model == "free_tree") g.tree.rank = params.value("rank", 2);
  if (g.model == "free_tree" && g.tree.rank < 2) throw input_error("free tree rank must be at least 2");
  if (g.model == "graph") g.graph_space = parse_graph(params);
  if (g.model != "h2" && g.model != "free_tree" && g.model != "graph")
    throw input_error("unknown model '" + g.model + "'");
  g.echo = json::array();
  const auto& gens = j.contains("generators") ? j["generators"] : json::array();
  if (!gens.is_array()) throw input_error("generators must be an array");
  const std::vector<std::string> default_names{"a", "b", "c", "d", "e", "f"};
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const auto& e = gens[i];
    std::string name = e.value("name", i < default_names.size() ? default_names[i] : "g" + std::to_string(i));
    g.names.push_back(name);
    json echo;
    echo["name"] = name;
    if (g.model == "h2") {
      const auto& m = detail::field(e, "matrix", "h2 generator");
      if (!m.is_array() || m.size() != 2 || !m[0].is_array() || !m[1].is_array() || m[0].size() != 2 ||
          m[1].size() != 2)
        throw input_error("matrix must be [[a, b], [c, d]]");
      double a = detail::get_double(m[0][0], "matrix entry"), b = detail::get_double(m[0][1], "matrix entry");
      double c = detail::get_double(m[1][0], "matrix entry"), d = detail::get_double(m[1][1], "matrix entry");
      if (std::fabs(a * d - b * c) < 1e-14) throw input_error("matrix is singular");
      g.h2_gens.push_back(h2::matrix(a, b, c, d));
      echo["matrix"] = m;
    } else if (g.model == "free_tree") {
      auto text = detail::field(e, "word", "free_tree generator").get<std::string>();
      g.tree_gens.push_back(words::parse(text, g.tree.rank));
      echo["word"] = text;
    } else {
      const auto& p = detail::field(e, "perm", "graph generator");
      std::vector<int> perm;
      for (const auto& x : p) perm.push_back(detail::get_int(x, "permutation entry"));
      g.graph_space.validate(perm);
      g.graph_gens.push_back(perm);
      echo["perm"] = p;
    }
    g.echo.push_back(echo);
  }
  if (j.contains("sample")) g.sample = j["sample"];
  return g;
}

/// Sample block: H2 {"center": [x, y], "radius", "n", "seed"}; tree {"center": word, "radius", "n"};
/// graph {"center", "radius"} or nothing for every vertex.
inline std::vector<h2::point> h2_sample(const json& s, std::uint64_t seed) {
  h2::point c{0.0, 1.0};
  if (s.contains("center")) c = {s["center"].at(0).get<double>(), s["center"].at(1).get<double>()};
  if (!(c.y > 0)) throw input_error("sample centre must have y > 0");
  double R = s.value("radius", 3.0);
  auto n = s.value("n", std::size_t{200});
  return h2::sample_ball_points(c, R, n, seed);
}

inline std::vector<word> tree_sample(const ftree::free_tree& t, const json& s) {
  word c = words::parse(s.value("center", std::string{}), t.rank);
  long R = std::lround(s.value("radius", 3.0));
  auto n = s.value("n", std::size_t{1000});
  auto pts = t.ball(c, R);
  if (pts.size() > n) pts.resize(n);
  return pts;
}

inline std::vector<int> graph_sample(const graph::metric_graph& g, const json& s) {
  if (s.is_object() && s.contains("center")) return g.ball(s["center"].get<int>(), s.value("radius", 1e300));
  std::vector<int> all;
  for (int v = 0; v < g.size(); ++v) all.push_back(v);
  return all;
}

/// Space input for the metric commands: an explicit {"points", "dist"} object or a model description with a sample block.
inline sampled_space load_space(const json& j, std::uint64_t seed) {
  if (j.contains("points")) return parse_sampled_space(j);
  auto g = parse_group_input(j);
  json s = g.sample.is_null() ? json::object() : g.sample;
  if (g.model == "h2") return h2::to_sampled(h2_sample(s, s.value("seed", seed)), "h2 sample");
  if (g.model == "free_tree") {
    auto pts = tree_sample(g.tree, s);
    return ftree::to_sampled(g.tree, pts, "free_tree rank=" + std::to_string(g.tree.rank));
  }
  return g.graph_space.to_sampled(graph_sample(g.graph_space, s), "graph");
}

// ---------------------------------------------------------------------------
// Writing

inline json to_json(const h2::point& p) { return json::array({num(p.x), num(p.y)}); }
inline json to_json(const h2::boundary& u) { return u.infinite ? json("inf") : num(u.x); }
inline json to_json(const h2::moebius& g) {
  return json::array({json::array({num(g.a), num(g.b)}), json::array({num(g.c), num(g.d)})});
}
inline json to_json(const h2::line& l) {
  json j;
  j["start"] = to_json(l.start());
  j["end"] = to_json(l.end());
  return j;
}


inline json word_json(const word& w, int rank) { return words::format(w, rank).empty() ? "e" : words::format(w, rank); }
inline json ray_json(const ftree::ray& r, int rank) { return ftree::format(r, rank); }
inline json axis_json(const ftree::axis_line& l, int rank) {
  json j;
  j["conj"] = word_json(l.conj, rank);
  j["core"] = word_json(l.core, rank);
  return j;
}

inline json estimate_json(const hyperbolicity_estimate& e) {
  json j;
  j["delta_hat"] = num(e.delta_hat);
  j["quadruples_checked"] = e.quadruples_checked;
  j["mode"] = e.mode == hyperbolicity_estimate::mode_t::exhaustive ? "exhaustive" : "sampled";
  j["worst_quadruple"] = e.worst_quadruple;
  return j;
}

inline json packing_json(const packing_profile& p) {
  json j;
  j["center"] = p.center;
  j["R"] = num(p.R);
  j["r"] = num(p.r);
  j["pack_exact"] = p.pack_exact ? json(*p.pack_exact) : json(nullptr);
  j["pack_greedy"] = p.pack_greedy;
  j["cov_greedy"] = p.cov_greedy;
  j["theoretical_bound"] = opt_num(p.theoretical_bound);
  j["witness"] = p.witness;
  return j;
}

inline json profile_json(const isometry_profile<h2::model>& p) {
  json j;
  j["kind"] = to_string(p.kind);
  j["ell"] = num(p.ell);
  j["asymptotic"] = num(p.asymptotic);
  j["orbit_rate"] = num(p.orbit_rate);
  j["trace"] = opt_num(p.trace);
  json fb = json::array();
  for (const auto& u : p.fixed_boundary) fb.push_back(to_json(u));
  j["fixed_boundary"] = fb;
  j["axis"] = p.axis ? to_json(*p.axis) : json(nullptr);
  j["fixed_point"] = p.fixed_point ? to_json(*p.fixed_point) : json(nullptr);
  j["identity"] = p.identity;
  return j;
}

inline json profile_json(const isometry_profile<ftree::free_tree>& p, int rank) {
  json j;
  j["kind"] = to_string(p.kind);
  j["ell"] = num(p.ell);
  j["asymptotic"] = num(p.asymptotic);
  j["orbit_rate"] = num(p.orbit_rate);
  json fb = json::array();
  for (const auto& u : p.fixed_boundary) fb.push_back(ray_json(u, rank));
  j["fixed_boundary"] = fb;
  j["axis"] = p.axis ? axis_json(*p.axis, rank) : json(nullptr);
  j["fixed_point"] = p.fixed_point ? word_json(*p.fixed_point, rank) : json(nullptr);
  j["identity"] = p.identity;
  return j;
}

inline json profile_json(const isometry_profile<graph::metric_graph>& p) {
  json j;
  j["kind"] = to_string(p.kind);
  j["ell"] = num(p.ell);
  j["min_displacement"] = opt_num(p.min_displacement);
  j["fixed_point"] = p.fixed_point ? json(*p.fixed_point) : json(nullptr);
  j["identity"] = p.identity;
  return j;
}

inline json census_json(const set_census& c) {
  json j;
  j["samples"] = c.samples;
  j["A+"] = c.a_plus;
  j["A-"] = c.a_minus;
  j["B+"] = c.b_plus;
  j["B-"] = c.b_minus;
  j["outside"] = c.outside;
  j["overlaps"] = c.overlaps;
  j["first_overlap"] = c.first_overlap ? json(*c.first_overlap) : json(nullptr);
  j["disjoint"] = c.disjoint();
  return j;
}

template <class Model, class PointFn, class LineFn>
json pingpong_json(const pingpong_data<Model>& d, PointFn pt, LineFn ln) {
  json j;
  j["alpha"] = ln(d.alpha);
  j["beta"] = ln(d.beta);
  j["x_minus"] = pt(d.x_minus);
  j["x_plus"] = pt(d.x_plus);
  j["y_minus"] = pt(d.y_minus);
  j["y_plus"] = pt(d.y_plus);
  j["M0"] = num(d.M0);
  j["delta"] = num(d.delta);
  j["ell"] = num(d.ell);
  j["N"] = d.N;
  j["N_min"] = d.N_min;
  j["b_inverted"] = d.swapped;
  j["sample_radius"] = num(d.radius);
  j["seed"] = d.seed;
  j["sets"] = census_json(d.sets);
  j["nesting_checks"] = d.nesting_checks;
  j["nesting_violations"] = d.nesting_violations;
  j["offending_point"] = d.offending ? pt(*d.offending) : json(nullptr);
  if (!d.offending_reason.empty()) j["offending_reason"] = d.offending_reason;
  j["passed"] = d.passed();
  return j;
}

template <class Model, class PointFn>
json margin_json(const schottky_margin_result<Model>& r, PointFn pt) {
  json j;
  j["L_hat"] = num(r.L_hat);
  j["threshold"] = num(r.threshold);
  j["passes"] = r.passes;
  j["power_cap"] = r.power_cap;
  j["one_sided"] = r.one_sided;
  j["grid_points"] = r.grid_points;
  j["argmin"] = r.argmin ? pt(*r.argmin) : json(nullptr);
  if (r.separation) {
    json e;
    e["candidate"] = pt(r.separation->candidate);
    e["holds"] = r.separation->holds;
    e["worst_margin"] = num(r.separation->worst_margin);
    e["worst_p"] = r.separation->worst_p;
    e["worst_q"] = r.separation->worst_q;
    j["product_separation"] = e;
  } else {
    j["product_separation"] = nullptr;
  }
  j["notes"] = r.notes;
  return j;
}

template <class Model, class IsoFn, class PointFn, class LineFn>
json certificate_json(const free_certificate<Model>& c, IsoFn iso, PointFn pt, LineFn ln) {
  json j;
  j["kind"] = to_string(c.kind);
  j["N"] = c.N;
  j["witness"] = words::format(c.witness, 2);
  json gens = json::array();
  for (const auto& g : c.generators) gens.push_back(iso(g));
  j["generators"] = gens;
  j["oracle_depth"] = c.oracle_depth;
  j["oracle_passed"] = c.oracle_passed;
  j["oracle_counterexample"] = c.oracle_counterexample ? json(words::format(*c.oracle_counterexample, 2)) : json(nullptr);
  j["geometric_checked"] = c.geometric_checked;
  j["geometric_passed"] = c.geometric_passed;
  j["valid"] = c.valid;
  if (std::holds_alternative<pingpong_data<Model>>(c.evidence))
    j["pingpong"] = pingpong_json(std::get<pingpong_data<Model>>(c.evidence), pt, ln);
  else if (std::holds_alternative<schottky_margin_result<Model>>(c.evidence))
    j["schottky_margin"] = margin_json(std::get<schottky_margin_result<Model>>(c.evidence), pt);
  else
    j["evidence"] = "word oracle only";
  j["notes"] = c.notes;
  return j;
}

/// Stable text form: two-space indent, trailing newline.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace hypcert::io
