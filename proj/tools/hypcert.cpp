#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hypcert/analysis/classify.hpp"
#include "hypcert/analysis/degenerate.hpp"
#include "hypcert/analysis/margulis.hpp"
#include "hypcert/bounds/bounds.hpp"
#include "hypcert/io/serialize.hpp"
#include "hypcert/metric/gromov.hpp"
#include "hypcert/metric/packing.hpp"
#include "hypcert/pingpong/pingpong.hpp"
#include "hypcert/tits/tits.hpp"

using namespace hypcert;
using io::json;
using io::num;

namespace {

enum exit_code : int { ok = 0, check_failed = 1, bad_input = 2, over_budget = 3, exhausted = 4 };

struct common_opts {
  std::string out;
  std::uint64_t seed = 1;
  bool timing = false;
};

struct config_opts {
  bounds_config bounds;
  long N_max = 64;
  int oracle_depth = 8;
  int conj_max = 16;
  std::string mode = "group";
};

std::uint64_t effective_seed(std::uint64_t flag) {
  if (const char* env = std::getenv("HYPCERT_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw input_error("HYPCERT_SEED must be a nonnegative integer");
    }
  }
  return flag;
}

json config_json(const config_opts& c) {
  json j;
  j["P0"] = num(c.bounds.P0);
  j["r0"] = num(c.bounds.r0);
  j["delta"] = num(c.bounds.delta);
  j["eps0"] = num(c.bounds.eps0);
  j["N"] = c.bounds.N;
  j["tolerance"] = num(c.bounds.tolerance);
  j["N_max"] = c.N_max;
  j["oracle_depth"] = c.oracle_depth;
  j["conj_max"] = c.conj_max;
  j["mode"] = c.mode;
  return j;
}

word_kind parse_mode(const std::string& m) {
  if (m == "group") return word_kind::group;
  if (m == "semigroup") return word_kind::semigroup;
  throw input_error("mode must be group or semigroup");
}

tits_config tits_cfg(const config_opts& c, std::uint64_t seed) {
  tits_config t;
  t.delta = c.bounds.delta;
  t.eps0 = c.bounds.eps0;
  t.N_max = c.N_max;
  t.oracle_depth = c.oracle_depth;
  t.conj_max = c.conj_max;
  t.mode = parse_mode(c.mode);
  t.sample.seed = seed;
  return t;
}

void add_common(CLI::App* sub, common_opts& o) {
  sub->add_option("--out", o.out, "Write the report here instead of stdout");
  sub->add_option("--seed", o.seed, "Sampling seed (HYPCERT_SEED overrides)");
  sub->add_flag("--timing", o.timing, "Record wall time in the manifest");
}

void add_config(CLI::App* sub, config_opts& c) {
  sub->add_option("--P0", c.bounds.P0, "Packing constant");
  sub->add_option("--r0", c.bounds.r0, "Packing scale");
  sub->add_option("--delta", c.bounds.delta, "Hyperbolicity constant");
  sub->add_option("--eps0", c.bounds.eps0, "Generalised Margulis constant");
  sub->add_option("--N", c.bounds.N, "Tits constant");
  sub->add_option("--tolerance", c.bounds.tolerance, "Comparison tolerance");
  sub->add_option("--N_max", c.N_max, "Largest power or witness length searched");
  sub->add_option("--oracle_depth,--depth", c.oracle_depth, "Word oracle depth");
  sub->add_option("--conj_max", c.conj_max, "Largest conjugate index b^j a b^-j");
  sub->add_option("--mode", c.mode, "group or semigroup");
}

struct run_context {
  std::string command;
  std::vector<std::string> inputs;
  json config = json::object();
  std::uint64_t seed = 1;
  bool timing = false;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  json manifest() const {
    json m;
    m["command"] = command;
    m["inputs"] = inputs;
    m["config"] = config;
    m["seed"] = seed;
    m["version"] = io::toolkit_version;
    if (timing)
      m["seconds"] = num(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    return m;
  }
};

void emit(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw input_error("cannot write '" + out + "'");
  f << text;
}

json report(const run_context& ctx, json body) {
  json j;
  j["manifest"] = ctx.manifest();
  for (auto& [k, v] : body.items()) j[k] = v;
  return j;
}

auto h2_pt = [](const h2::point& p) { return io::to_json(p); };
auto h2_ln = [](const h2::line& l) { return io::to_json(l); };
auto h2_iso = [](const h2::moebius& g) { return io::to_json(g); };

struct tree_fns {
  int rank;
  json pt(const word& w) const { return io::word_json(w, rank); }
  json ln(const ftree::axis_line& l) const { return io::axis_json(l, rank); }
};

io::group_input load_group(const std::string& path) { return io::parse_group_input(io::read_json_file(path)); }

void need_pair(const io::group_input& g) {
  if (g.size() != 2) throw input_error("this command needs exactly two generators");
}

// ---------------------------------------------------------------------------
// commands

int cmd_delta(const std::string& input, std::size_t cap, std::uint64_t sample_n, run_context& ctx,
              const std::string& out) {
  auto s = io::load_space(io::read_json_file(input), ctx.seed);
  auto budget = sample_n > 0 ? delta_budget::sample(sample_n, ctx.seed) : delta_budget::exhaustive(cap);
  ctx.config["cap"] = cap;
  ctx.config["sample"] = sample_n;
  auto est = four_point_delta(s, budget);
  json body;
  body["space"] = {{"points", s.size()}, {"provenance", s.provenance() ? json(*s.provenance()) : json(nullptr)}};
  body["estimate"] = io::estimate_json(est);
  emit(out, io::dump(report(ctx, body)));
  return ok;
}

std::size_t center_index(const sampled_space& s, const std::string& center) {
  return center.empty() ? 0 : s.index_of(center);
}

int cmd_pack(const std::string& input, const std::string& center, double R, double r, const std::string& mode,
             std::size_t cap, const config_opts& cfg, bool with_bound, run_context& ctx, const std::string& out) {
  auto s = io::load_space(io::read_json_file(input), ctx.seed);
  if (mode != "exact" && mode != "greedy") throw input_error("mode must be exact or greedy");
  ctx.config = {{"center", center}, {"R", num(R)}, {"r", num(r)}, {"mode", mode}, {"cap", cap}};
  auto prof = packing_number(s, center_index(s, center), R, r, mode == "exact" ? count_mode::exact : count_mode::greedy,
                             cap);
  if (with_bound) {
    ctx.config["P0"] = num(cfg.bounds.P0);
    ctx.config["r0"] = num(cfg.bounds.r0);
    prof.theoretical_bound = packing_bound(cfg.bounds.P0, cfg.bounds.r0, R, r);
  }
  json body;
  body["profile"] = io::packing_json(prof);
  bool pass = !prof.theoretical_bound || !prof.pack_exact ||
              static_cast<double>(*prof.pack_exact) <= *prof.theoretical_bound + cfg.bounds.tolerance;
  body["within_bound"] = pass;
  emit(out, io::dump(report(ctx, body)));
  return pass ? ok : check_failed;
}

int cmd_cov(const std::string& input, const std::string& center, double R, double r, const std::string& mode,
            std::size_t cap, run_context& ctx, const std::string& out) {
  auto s = io::load_space(io::read_json_file(input), ctx.seed);
  if (mode != "exact" && mode != "greedy") throw input_error("mode must be exact or greedy");
  auto m = mode == "exact" ? count_mode::exact : count_mode::greedy;
  ctx.config = {{"center", center}, {"R", num(R)}, {"r", num(r)}, {"mode", mode}, {"cap", cap}};
  auto region = closed_ball(s, center_index(s, center), R);
  std::vector<std::size_t> centers;
  auto cov = covering_number(s, region, r, m, cap, default_tolerance, &centers);
  json body;
  body["region_size"] = region.size();
  body["cov"] = cov;
  std::vector<std::string> ids;
  for (auto c : centers) ids.push_back(s.id(c));
  body["centers"] = ids;
  // chain Pack(Y, 2r) <= Cov(Y, 2r) <= Pack(Y, r)
  auto pack_r = max_separated(s, region, r, m, cap).size();
  auto pack_2r = max_separated(s, region, 2 * r, m, cap).size();
  auto cov_2r = covering_number(s, region, 2 * r, m, cap);
  json chain;
  chain["pack_2r"] = pack_2r;
  chain["cov_2r"] = cov_2r;
  chain["pack_r"] = pack_r;
  bool holds = mode != "exact" || (pack_2r <= cov_2r && cov_2r <= pack_r);
  chain["holds"] = mode == "exact" ? json(holds) : json("not checked for greedy counts");
  body["chain"] = chain;
  emit(out, io::dump(report(ctx, body)));
  return holds ? ok : check_failed;
}

int cmd_classify(const std::string& input, const std::string& word_text, run_context& ctx, const std::string& out) {
  auto g = load_group(input);
  json body;
  body["model"] = g.model;
  body["generators"] = g.echo;
  json profiles = json::array();
  auto one = [&](const std::string& name, auto&& prof_json) {
    json p;
    p["name"] = name;
    for (auto& [k, v] : prof_json.items()) p[k] = v;
    profiles.push_back(p);
  };
  if (!word_text.empty()) ctx.config["word"] = word_text;
  if (g.model == "h2") {
    h2::model m;
    for (std::size_t i = 0; i < g.size(); ++i) one(g.names[i], io::profile_json(classify(m, g.h2_gens[i])));
    if (!word_text.empty())
      one(word_text, io::profile_json(classify(m, evaluate(m, g.h2_gens, words::parse(word_text, g.names)))));
  } else if (g.model == "free_tree") {
    for (std::size_t i = 0; i < g.size(); ++i)
      one(g.names[i], io::profile_json(classify(g.tree, g.tree_gens[i]), g.tree.rank));
    if (!word_text.empty())
      one(word_text, io::profile_json(classify(g.tree, words::reduce(evaluate(g.tree, g.tree_gens,
                                                                               words::parse(word_text, g.names)))),
                                      g.tree.rank));
  } else {
    for (std::size_t i = 0; i < g.size(); ++i) one(g.names[i], io::profile_json(classify(g.graph_space, g.graph_gens[i])));
    if (!word_text.empty())
      one(word_text, io::profile_json(classify(g.graph_space, evaluate(g.graph_space, g.graph_gens,
                                                                       words::parse(word_text, g.names)))));
  }
  body["profiles"] = profiles;
  emit(out, io::dump(report(ctx, body)));
  return ok;
}

template <class Model, class IsoFn, class PtFn, class LnFn>
json witness_json(const tits_witness_result<Model>& r, IsoFn iso, PtFn pt, LnFn ln) {
  json j;
  j["case"] = to_string(r.case_tag);
  j["N"] = r.N;
  j["w"] = words::format(r.w, 2);
  j["route"] = r.route;
  j["b_conjugated"] = r.b_conjugated;
  j["words_examined"] = r.words_examined;
  j["certificate"] = io::certificate_json(r.certificate, iso, pt, ln);
  return j;
}

int cmd_tits(const std::string& input, std::optional<long> fixed_N, bool certificate_only, const config_opts& cfg,
             run_context& ctx, const std::string& out) {
  auto g = load_group(input);
  need_pair(g);
  auto tc = tits_cfg(cfg, ctx.seed);
  ctx.config = config_json(cfg);
  if (fixed_N) ctx.config["fixed_N"] = *fixed_N;
  json body;
  body["model"] = g.model;
  body["generators"] = g.echo;
  bool valid = false;
  if (g.model == "h2") {
    h2::model m;
    if (fixed_N) {
      auto c = pingpong_certify(m, g.h2_gens[0], g.h2_gens[1], *fixed_N, tc.delta, tc.sample, tc.oracle_depth);
      valid = c.valid;
      body["certificate"] = io::certificate_json(c, h2_iso, h2_pt, h2_ln);
    } else {
      auto r = tits_witness(m, g.h2_gens[0], g.h2_gens[1], tc);
      valid = r.certificate.valid;
      auto wj = witness_json(r, h2_iso, h2_pt, h2_ln);
      if (certificate_only) {
        body["certificate"] = wj["certificate"];
        body["search"] = {{"case", wj["case"]}, {"route", wj["route"]}, {"w", wj["w"]}};
      } else {
        body["witness"] = wj;
      }
    }
  } else if (g.model == "free_tree") {
    tree_fns f{g.tree.rank};
    auto iso = [&](const word& w) { return f.pt(w); };
    auto pt = [&](const word& w) { return f.pt(w); };
    auto ln = [&](const ftree::axis_line& l) { return f.ln(l); };
    if (fixed_N) {
      auto c = pingpong_certify(g.tree, g.tree_gens[0], g.tree_gens[1], *fixed_N, tc.delta, tc.sample, tc.oracle_depth);
      valid = c.valid;
      body["certificate"] = io::certificate_json(c, iso, pt, ln);
    } else {
      auto r = tits_witness(g.tree, g.tree_gens[0], g.tree_gens[1], tc);
      valid = r.certificate.valid;
      auto wj = witness_json(r, iso, pt, ln);
      if (certificate_only) {
        body["certificate"] = wj["certificate"];
        body["search"] = {{"case", wj["case"]}, {"route", wj["route"]}, {"w", wj["w"]}};
      } else {
        body["witness"] = wj;
      }
    }
  } else {
    throw input_error("graph automorphisms are elliptic; certification needs an h2 or free_tree description");
  }
  emit(out, io::dump(report(ctx, body)));
  return valid ? ok : check_failed;
}

int cmd_margulis(const std::string& input, const std::string& gen, double eps1, double eps2, long cap, double slack,
                 const config_opts& cfg, bool with_packing, run_context& ctx, const std::string& out) {
  auto g = load_group(input);
  std::size_t idx = 0;
  if (!gen.empty()) {
    auto it = std::find(g.names.begin(), g.names.end(), gen);
    if (it == g.names.end()) throw input_error("unknown generator '" + gen + "'");
    idx = static_cast<std::size_t>(it - g.names.begin());
  }
  if (g.size() == 0) throw input_error("margulis needs a generator");
  ctx.config = {{"generator", g.names[idx]}, {"eps1", num(eps1)}, {"eps2", num(eps2)}, {"power_cap", cap},
                {"sampling_slack", num(slack)}};
  domain_gap_options opt;
  opt.power_cap = cap;
  opt.sampling_slack = slack;
  if (with_packing) {
    opt.P0 = cfg.bounds.P0;
    opt.r0 = cfg.bounds.r0;
    ctx.config["P0"] = num(cfg.bounds.P0);
    ctx.config["r0"] = num(cfg.bounds.r0);
  }
  json s = g.sample.is_null() ? json::object() : g.sample;
  domain_gap_report rep;
  if (g.model == "h2") {
    if (!s.contains("n")) s["n"] = 1000;
    ctx.config["sample"] = s;
    h2::model m;
    rep = domain_gap(m, g.h2_gens[idx], eps1, eps2, io::h2_sample(s, s.value("seed", ctx.seed)), opt);
  } else if (g.model == "free_tree") {
    ctx.config["sample"] = s;
    rep = domain_gap(g.tree, g.tree_gens[idx], eps1, eps2, io::tree_sample(g.tree, s), opt);
  } else {
    throw input_error("margulis needs an h2 or free_tree description");
  }
  json r;
  r["samples"] = rep.samples;
  r["inner_members"] = rep.inner_members;
  r["outer_members"] = rep.outer_members;
  r["min_gap_observed"] = io::opt_num(rep.min_gap_observed);
  r["lower_bound_i"] = num(rep.lower_bound_i);
  r["lower_bound_ii"] = io::opt_num(rep.lower_bound_ii);
  r["upper_span_observed"] = io::opt_num(rep.upper_span_observed);
  r["displacement_ratio_observed"] = io::opt_num(rep.displacement_ratio_observed);
  r["holds"] = rep.holds;
  json body;
  body["generator"] = g.echo[idx];
  body["report"] = r;
  emit(out, io::dump(report(ctx, body)));
  return rep.holds ? ok : check_failed;
}

std::vector<double> radius_grid(double lo, double hi, double step) {
  if (!(step > 0) || hi < lo) throw input_error("radius grid needs R_min <= R_max and a positive step");
  std::vector<double> out;
  for (int k = 0;; ++k) {
    double R = lo + step * k;
    if (R > hi + 1e-9) break;
    out.push_back(R);
  }
  return out;
}

json entropy_json(const entropy_report& r) {
  json j;
  j["source"] = r.source;
  json rows = json::array();
  for (std::size_t i = 0; i < r.radii.size(); ++i) rows.push_back({num(r.radii[i]), num(r.counts[i])});
  j["counts"] = rows;
  j["fit_from_radius"] = num(r.radii[r.fit_from]);
  j["estimate"] = num(r.estimate);
  j["partial"] = r.partial;
  return j;
}

int cmd_entropy(const std::string& input, double lo, double hi, double step, int word_cap, std::string context,
                bool verify_packing, config_opts cfg, run_context& ctx, const std::string& out) {
  auto g = load_group(input);
  auto radii = radius_grid(lo, hi, step);
  if (word_cap <= 0) word_cap = static_cast<int>(std::ceil(hi));
  entropy_report rep;
  std::optional<std::size_t> verified;
  if (g.model == "free_tree") {
    if (g.tree_gens.empty()) throw input_error("entropy of a free_tree description needs generators");
    rep = orbit_entropy(g.tree, g.tree_gens, word{}, radii, word_cap);
    if (verify_packing) {
      auto s = ftree::sample_ball(g.tree, word{}, std::ceil(3 * cfg.bounds.r0) + 1, 5000);
      verified = verified_packing_constant(s, cfg.bounds.r0);
    }
  } else if (g.model == "h2") {
    h2::model m;
    rep = orbit_entropy(m, g.h2_gens, m.base_point(), radii, word_cap);
    if (verify_packing) throw input_error("packing verification is available for free_tree and graph descriptions");
  } else {
    json s = g.sample.is_null() ? json::object() : g.sample;
    auto pts = io::graph_sample(g.graph_space, s);
    auto space = g.graph_space.to_sampled(pts, "graph");
    rep = ball_entropy(space, 0, radii);
    if (verify_packing) verified = verified_packing_constant(space, cfg.bounds.r0);
  }
  if (verified) cfg.bounds.P0 = static_cast<double>(*verified);
  if (context.empty()) context = g.size() >= 2 ? "group_nonelementary" : "space";
  if (context != "group_nonelementary" && context != "space")
    throw input_error("context must be group_nonelementary or space");
  ctx.config = config_json(cfg);
  ctx.config["radii"] = {num(lo), num(hi), num(step)};
  ctx.config["word_cap"] = word_cap;
  ctx.config["context"] = context;
  ctx.config["verify_packing"] = verify_packing;
  auto chk = entropy_bounds_check(cfg.bounds, rep.estimate,
                                  context == "space" ? entropy_context::space : entropy_context::group_nonelementary);
  json body;
  body["model"] = g.model;
  body["generators"] = g.echo;
  body["entropy"] = entropy_json(rep);
  json b;
  b["P0_verified"] = verified ? json(*verified) : json(nullptr);
  b["C0"] = num(chk.C0);
  b["E0"] = num(chk.E0);
  b["lower_checked"] = chk.lower_checked;
  b["lower_pass"] = chk.lower_pass;
  b["upper_pass"] = chk.upper_pass;
  b["passed"] = chk.passed();
  body["bounds"] = b;
  emit(out, io::dump(report(ctx, body)));
  return chk.passed() ? ok : check_failed;
}

json constants_json(const bounds_config& c) {
  auto d = derive(c);
  json j;
  j["C0"] = num(d.C0);
  j["E0"] = num(d.E0);
  j["H0"] = num(d.H0);
  return j;
}

int cmd_bounds(const std::string& input, std::optional<double> nilrad, std::optional<double> eps,
               const std::vector<double>& R_grid, const std::vector<double>& r_grid, const config_opts& cfg,
               run_context& ctx, const std::string& out) {
  ctx.config = config_json(cfg);
  ctx.config["nilrad_plus"] = nilrad ? num(*nilrad) : json("-inf");
  ctx.config["eps"] = io::opt_num(eps);
  ctx.config["R_grid"] = R_grid;
  ctx.config["r_grid"] = r_grid;
  json body;
  body["constants"] = constants_json(cfg.bounds);
  json m;
  m["systole_floor"] = num(systole_floor(cfg.bounds, nilrad ? *nilrad : no_thin_part));
  if (eps) m["R_eps"] = num(derive(cfg.bounds).R_eps(*eps));
  json table = json::array();
  for (double R : R_grid)
    for (double r : r_grid)
      if (r <= R) table.push_back({{"R", num(R)}, {"r", num(r)}, {"bound", num(packing_bound(cfg.bounds.P0, cfg.bounds.r0, R, r))}});
  m["packing_bound"] = table;
  json ledger = json::array();
  bool all = true;
  if (!input.empty()) {
    ctx.inputs.push_back(input);
    auto s = io::load_space(io::read_json_file(input), ctx.seed);
    auto P0 = verified_packing_constant(s, cfg.bounds.r0);
    bool packed = static_cast<double>(P0) <= cfg.bounds.P0;
    ledger.push_back({{"check", "declared P0 verified on sample"}, {"measured", P0}, {"pass", packed}});
    all = all && packed;
    std::size_t violations = 0;
    json rows = json::array();
    for (double R : R_grid)
      for (double r : r_grid) {
        if (r > R || r > cfg.bounds.r0) continue;
        auto measured = packing_function(s, R, r);
        double bound = packing_bound(static_cast<double>(P0), cfg.bounds.r0, R, r);
        violations += static_cast<double>(measured) > bound + cfg.bounds.tolerance;
        rows.push_back({{"R", num(R)}, {"r", num(r)}, {"measured", measured}, {"bound", num(bound)}});
      }
    m["propagation"] = rows;
    ledger.push_back({{"check", "measured Pack(R, r) within propagated bound"}, {"violations", violations},
                      {"pass", violations == 0}});
    all = all && violations == 0;
  }
  body["measurements"] = m;
  body["ledger"] = ledger;
  emit(out, io::dump(report(ctx, body)));
  return all ? ok : check_failed;
}

template <class Model, class PtFn>
json stats_json(const action_stats<Model>& st, const bounds_config& cfg, PtFn pt, bool& pass) {
  json j;
  json pts = json::array();
  for (std::size_t i = 0; i < st.sample.size(); ++i)
    pts.push_back({{"x", pt(st.sample[i])}, {"sys", num(st.sys_at[i])}, {"sys_free", num(st.sys_free_at[i])},
                   {"nilrad", num(st.nilrad_at[i])}, {"thin", static_cast<bool>(st.thin[i])}});
  j["points"] = pts;
  j["word_cap"] = st.word_cap;
  j["elements"] = st.elements;
  j["finite_order_excluded"] = st.finite_order_excluded;
  j["dias_estimate"] = num(st.dias_estimate);
  j["sys_free_min"] = num(st.sys_free_min);
  j["nilrad_plus_sampled"] = num(st.nilrad_plus_estimate);
  double floor = systole_floor(cfg, st.nilrad_plus_estimate);
  j["systole_floor"] = num(floor);
  j["truncation"] = "all values are estimates over reduced words up to word_cap on the listed sample";
  pass = st.sys_free_min >= floor - cfg.tolerance;
  j["ledger"] = json::array({{{"check", "sys_free >= systole floor"}, {"pass", pass}}});
  return j;
}

int cmd_stats(const std::string& input, int word_cap, const config_opts& cfg, run_context& ctx,
              const std::string& out) {
  auto g = load_group(input);
  ctx.config = config_json(cfg);
  ctx.config["word_cap"] = word_cap;
  action_options opt;
  opt.word_cap = word_cap;
  json s = g.sample.is_null() ? json::object() : g.sample;
  bool pass = true;
  json body;
  body["model"] = g.model;
  body["generators"] = g.echo;
  if (g.model == "h2") {
    h2::model m;
    std::vector<h2::point> pts;
    if (s.contains("points")) {
      for (const auto& p : s["points"]) pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    } else {
      pts = io::h2_sample(s, s.value("seed", ctx.seed));
    }
    body["stats"] = stats_json(compute_action_stats(m, g.h2_gens, pts, cfg.bounds, opt), cfg.bounds, h2_pt, pass);
  } else if (g.model == "free_tree") {
    tree_fns f{g.tree.rank};
    body["stats"] = stats_json(compute_action_stats(g.tree, g.tree_gens, io::tree_sample(g.tree, s), cfg.bounds, opt),
                               cfg.bounds, [&](const word& w) { return f.pt(w); }, pass);
  } else {
    body["stats"] = stats_json(compute_action_stats(g.graph_space, g.graph_gens, io::graph_sample(g.graph_space, s),
                                                    cfg.bounds, opt),
                               cfg.bounds, [](int v) { return json(v); }, pass);
  }
  emit(out, io::dump(report(ctx, body)));
  return pass ? ok : check_failed;
}

int cmd_degenerate(const std::string& input, int steps_flag, run_context& ctx, const std::string& out) {
  json plan = input.empty() ? json::object() : io::read_json_file(input);
  std::string family = plan.value("family", std::string("pulling_together"));
  if (family != "pulling_together") throw input_error("unknown family '" + family + "'");
  h2::moebius a = h2::matrix(2, 0, 0, 0.5);
  if (plan.contains("a")) {
    const auto& m = plan["a"];
    a = h2::matrix(m.at(0).at(0).get<double>(), m.at(0).at(1).get<double>(), m.at(1).at(0).get<double>(),
                   m.at(1).at(1).get<double>());
  }
  const int steps = steps_flag > 0 ? steps_flag : plan.value("steps", 41);
  const int word_cap = plan.value("word_cap", 3);
  auto fam = make_degeneration(a, plan.value("D_offset", 2.0));
  auto path = degeneration_path(fam, steps, word_cap);
  ctx.config = {{"family", family}, {"a", io::to_json(a)}, {"D_star", num(fam.D_star)}, {"D0", num(fam.D0)},
                {"steps", steps}, {"word_cap", word_cap}};
  std::ostringstream csv;
  csv << "t,ell,trace,kind,sys\n";
  auto fmt = [](double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::string(buf);
  };
  for (const auto& s : path)
    csv << fmt(s.t) << ',' << fmt(s.ell) << ',' << fmt(s.trace) << ',' << to_string(s.kind) << ',' << fmt(s.sys)
        << '\n';
  if (!out.empty()) {
    emit(out, csv.str());
    // the manifest rides alongside the CSV
    emit(out + ".manifest.json", io::dump(ctx.manifest()));
  } else {
    std::cout << csv.str();
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certificates and bound checks for groups acting on hyperbolic spaces"};
  app.require_subcommand(1);
  common_opts common;
  config_opts cfg;
  std::string input;

  auto* delta = app.add_subcommand("delta", "Four-point hyperbolicity estimate of a space");
  std::size_t delta_cap = 200;
  std::uint64_t delta_sample = 0;
  delta->add_option("input", input, "Space JSON or model description")->required();
  delta->add_option("--cap", delta_cap, "Exhaustive point cap");
  delta->add_option("--sample", delta_sample, "Sampled quadruples instead of the exhaustive scan");

  std::string center, mode = "exact";
  double R = 2, r = 1;
  std::size_t cap = 64;
  auto* pack = app.add_subcommand("pack", "Packing number of a ball");
  pack->add_option("input", input)->required();
  pack->add_option("--center", center);
  pack->add_option("--R", R);
  pack->add_option("--r", r);
  pack->add_option("--count", mode, "exact or greedy");
  pack->add_option("--cap", cap);
  bool with_bound = false;
  pack->add_flag("--bound", with_bound, "Compare with the propagated bound for P0, r0");
  pack->add_option("--P0", cfg.bounds.P0);
  pack->add_option("--r0", cfg.bounds.r0);
  pack->add_option("--tolerance", cfg.bounds.tolerance);

  auto* cov = app.add_subcommand("cov", "Covering number of a ball");
  cov->add_option("input", input)->required();
  cov->add_option("--center", center);
  cov->add_option("--R", R);
  cov->add_option("--r", r);
  cov->add_option("--count", mode, "exact or greedy");
  cov->add_option("--cap", cap);

  std::string word_text;
  auto* cls = app.add_subcommand("classify", "Classify generators (and optionally a word)");
  cls->add_option("input", input)->required();
  cls->add_option("--word", word_text);

  std::optional<long> fixed_N;
  auto* certify = app.add_subcommand("certify", "Free-subgroup certificate for a pair");
  certify->add_option("input", input)->required();
  add_config(certify, cfg);
  certify->add_option("--power", fixed_N, "Certify <a^N, b^N> at this N instead of searching");

  auto* tits = app.add_subcommand("tits", "Search for a Tits witness (N, w)");
  tits->add_option("input", input)->required();
  add_config(tits, cfg);

  std::string gen;
  double eps1 = 1.5, eps2 = 2.0, slack = 0.02;
  long power_cap = 64;
  bool with_packing = false;
  auto* marg = app.add_subcommand("margulis", "Margulis domain gap report");
  marg->add_option("input", input)->required();
  marg->add_option("--generator", gen);
  marg->add_option("--eps1", eps1);
  marg->add_option("--eps2", eps2);
  marg->add_option("--power_cap", power_cap);
  marg->add_option("--slack", slack);
  marg->add_flag("--packing", with_packing, "Report the second gap bound for P0, r0");
  marg->add_option("--P0", cfg.bounds.P0);
  marg->add_option("--r0", cfg.bounds.r0);

  double R_min = 1, R_max = 12, R_step = 1;
  int word_cap = 0;
  std::string context;
  bool verify = false;
  auto* ent = app.add_subcommand("entropy", "Entropy estimate with two-sided bound check");
  ent->add_option("input", input)->required();
  ent->add_option("--R_min", R_min);
  ent->add_option("--R_max", R_max);
  ent->add_option("--R_step", R_step);
  ent->add_option("--word_cap", word_cap);
  ent->add_option("--context", context, "group_nonelementary or space");
  ent->add_flag("--verify_packing", verify, "Replace P0 by the packing constant measured at r0");
  add_config(ent, cfg);

  std::optional<double> nilrad, eps;
  std::vector<double> R_grid{1, 2, 3, 4}, r_grid{0.5, 1};
  auto* bnd = app.add_subcommand("bounds", "Constant ledger and packing propagation");
  bnd->add_option("input", input, "Optional space to verify P0 and the propagation bound on");
  bnd->add_option("--nilrad_plus", nilrad);
  bnd->add_option("--eps", eps);
  bnd->add_option("--R_grid", R_grid);
  bnd->add_option("--r_grid", r_grid);
  add_config(bnd, cfg);

  int stats_cap = 4;
  auto* stats = app.add_subcommand("stats", "Systole, diastole and nilradius estimates");
  stats->add_option("input", input)->required();
  stats->add_option("--word_cap", stats_cap);
  add_config(stats, cfg);

  int steps = 0;
  auto* degen = app.add_subcommand("degenerate", "Degeneration trajectory as CSV");
  degen->add_option("input", input, "Family description JSON");
  degen->add_option("--steps", steps);

  for (auto* sub : {delta, pack, cov, cls, certify, tits, marg, ent, bnd, stats, degen}) add_common(sub, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return bad_input;
  }

  try {
    run_context ctx;
    ctx.command = app.get_subcommands().front()->get_name();
    ctx.seed = effective_seed(common.seed);
    ctx.timing = common.timing;
    if (!input.empty() && ctx.command != "bounds") ctx.inputs.push_back(input);
    cfg.bounds.validate();
    const auto& out = common.out;
    if (ctx.command == "delta") return cmd_delta(input, delta_cap, delta_sample, ctx, out);
    if (ctx.command == "pack") return cmd_pack(input, center, R, r, mode, cap, cfg, with_bound, ctx, out);
    if (ctx.command == "cov") return cmd_cov(input, center, R, r, mode, cap, ctx, out);
    if (ctx.command == "classify") return cmd_classify(input, word_text, ctx, out);
    if (ctx.command == "certify") return cmd_tits(input, fixed_N, true, cfg, ctx, out);
    if (ctx.command == "tits") return cmd_tits(input, std::nullopt, false, cfg, ctx, out);
    if (ctx.command == "margulis")
      return cmd_margulis(input, gen, eps1, eps2, power_cap, slack, cfg, with_packing, ctx, out);
    if (ctx.command == "entropy")
      return cmd_entropy(input, R_min, R_max, R_step, word_cap, context, verify, cfg, ctx, out);
    if (ctx.command == "bounds") return cmd_bounds(input, nilrad, eps, R_grid, r_grid, cfg, ctx, out);
    if (ctx.command == "stats") return cmd_stats(input, stats_cap, cfg, ctx, out);
    if (ctx.command == "degenerate") return cmd_degenerate(input, steps, ctx, out);
  } catch (const search_exhausted& e) {
    std::cerr << "search exhausted: " << e.what() << '\n';
    return exhausted;
  } catch (const budget_error& e) {
    std::cerr << "budget exceeded: " << e.what() << " (reached " << e.reached() << ")\n";
    return over_budget;
  } catch (const error& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return bad_input;
  } catch (const json::exception& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return bad_input;
  }
  return bad_input;
}
