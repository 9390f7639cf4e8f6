// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

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
namespace fs = std::filesystem;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

struct outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

const h2::moebius shipped_a = h2::matrix(2, 0, 0, 0.5);
const h2::moebius shipped_b = h2::matrix(1.25, 0.75, 0.75, 1.25);

fs::path fixture(const std::string& name) { return fs::path(HYPCERT_ROOT) / "fixtures" / name; }

outcome tree_exactness() {
  ftree::free_tree t{2};
  bool exact = true;
  double worst_secs = 0;
  // the first 100 shortlex words, then 100-point prefixes of larger balls
  for (long R : {4L, 5L, 6L}) {
    auto pts = t.ball({}, R);
    pts.resize(100);
    auto s = ftree::to_sampled(t, pts);
    auto t0 = clock_type::now();
    auto e = four_point_delta(s);
    worst_secs = std::max(worst_secs, seconds_since(t0));
    exact = exact && e.delta_hat == 0.0 && e.mode == hyperbolicity_estimate::mode_t::exhaustive;
  }
  auto off = ftree::to_sampled(t, t.ball(words::parse("ab^-1a", 2), 2));
  exact = exact && four_point_delta(off).delta_hat == 0.0;
  return {exact && worst_secs < 1.0, "delta_hat = 0 on all samples, slowest 100-point scan " + fmt("%.3f", worst_secs) + " s"};
}

outcome grid_growth() {
  auto d8 = four_point_delta(graph::grid(8).to_sampled(graph::grid(8).ball(0, 1e9))).delta_hat;
  auto g16 = graph::grid(16);
  auto d16 = four_point_delta(g16.to_sampled(g16.ball(0, 1e9)), delta_budget::exhaustive(256)).delta_hat;
  double ratio = d16 / d8;
  return {d8 > 0 && ratio >= 1.8 * 0.9,
          "delta_hat(8) = " + fmt("%g", d8) + ", delta_hat(16) = " + fmt("%g", d16) + ", ratio " + fmt("%.3f", ratio) +
              " (need >= 1.8 within 10%)"};
}

outcome exact_packing() {
  ftree::free_tree t{2};
  auto s = ftree::to_sampled(t, t.ball({}, 2));
  auto e = s.index_of("e");
  auto t0 = clock_type::now();
  auto p1 = *packing_number(s, e, 1, 1, count_mode::exact).pack_exact;
  double s1 = seconds_since(t0);
  t0 = clock_type::now();
  auto p2 = *packing_number(s, e, 2, 1, count_mode::exact).pack_exact;
  double s2 = seconds_since(t0);
  std::size_t chains = 0, broken = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto g = graph::random_graph(12, 0.12, seed);
    auto gs = g.to_sampled(g.ball(0, 1e9));
    for (double R : {1.0, 2.5})
      for (double r : {0.5, 1.0}) {
        auto region = closed_ball(gs, 0, R);
        auto pack2 = max_separated(gs, region, 2 * r, count_mode::exact).size();
        auto cov2 = covering_number(gs, region, 2 * r, count_mode::exact);
        auto pack1 = max_separated(gs, region, r, count_mode::exact).size();
        ++chains;
        broken += !(pack2 <= cov2 && cov2 <= pack1);
      }
  }
  bool ok = p1 == 1 && p2 == 4 && s1 < 1 && s2 < 1 && broken == 0;
  return {ok, "Pack(B(e,1),1) = " + std::to_string(p1) + ", Pack(B(e,2),1) = " + std::to_string(p2) + ", chain held " +
                  std::to_string(chains - broken) + "/" + std::to_string(chains) + " on 100 random graphs"};
}

outcome propagation() {
  // fixtures with their packing scale, plus seeded random graphs
  std::vector<std::pair<sampled_space, double>> spaces;
  auto load = [](const std::string& name) { return io::load_space(io::read_json_file(fixture(name).string()), 1); };
  spaces.emplace_back(load("tree_ball2.json"), 0.5);
  spaces.emplace_back(load("tree_sample100.json"), 0.5);
  spaces.emplace_back(load("triangle_graph.json"), 1.0);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto g = graph::random_graph(16, 0.08, seed);
    spaces.emplace_back(g.to_sampled(g.ball(0, 1e9)), 1.0);
  }
  std::size_t checks = 0, violations = 0;
  std::string failure;
  for (const auto& [s, r0] : spaces) {
    double P0 = 0;
    try {
      P0 = static_cast<double>(verified_packing_constant(s, r0));
    } catch (const packing_budget_error&) {
      continue;  // not verified, so not in scope
    }
    for (double R : {1.0, 2.0, 3.0, 4.0})
      for (double r : {0.25, 0.5, 1.0}) {
        if (r > r0 || r > R) continue;
        std::size_t measured = 0;
        try {
          measured = packing_function(s, R, r);
        } catch (const packing_budget_error&) {
          continue;
        }
        ++checks;
        if (static_cast<double>(measured) > packing_bound(P0, r0, R, r) + 1e-9) ++violations;
      }
  }
  return {checks > 0 && violations == 0,
          std::to_string(checks) + " grid checks over " + std::to_string(spaces.size()) + " spaces, " +
              std::to_string(violations) + " violations"};
}

outcome classification() {
  h2::model m;
  rng gen(2718);
  double worst_rate = 0, worst_power = 0;
  int checked = 0;
  while (checked < 50) {
    double a = gen.uniform(-3, 3), b = gen.uniform(-3, 3), c = gen.uniform(-3, 3), d = gen.uniform(-3, 3);
    double det = a * d - b * c;
    if (det < 0.05) continue;
    auto g = h2::matrix(a, b, c, d);
    if (std::fabs(g.trace()) < 2.05) continue;
    ++checked;
    auto p = classify(m, g);
    worst_rate = std::max(worst_rate, std::fabs(p.orbit_rate - p.ell));
    for (long k = 1; k <= 8; ++k)
      worst_power = std::max(worst_power, std::fabs(classify(m, h2::power(g, k)).ell - static_cast<double>(k) * p.ell));
  }
  return {worst_rate <= 1e-6 && worst_power <= 1e-9,
          "50 matrices, max |trace - orbit| = " + fmt("%.2e", worst_rate) + ", max |ell(g^k) - k ell| = " +
              fmt("%.2e", worst_power)};
}

outcome margulis_gap() {
  h2::model m;
  auto t0 = clock_type::now();
  auto sample = h2::sample_ball_points({0, 1}, 2.5, 1000, 2024);
  auto rep = domain_gap(m, shipped_a, 1.5, 2.0, sample);
  double secs = seconds_since(t0);
  double gap = rep.min_gap_observed ? *rep.min_gap_observed : -1;
  return {rep.min_gap_observed && gap >= 0.25 - 0.02 && rep.samples == 1000 && secs < 10,
          "min sampled gap " + fmt("%.6f", gap) + " over " + std::to_string(rep.samples) + " samples in " +
              fmt("%.2f", secs) + " s (need >= 0.23)"};
}

outcome pingpong_sets() {
  h2::model m;
  auto c = pingpong_certify(m, shipped_a, shipped_b, 56, 1.0);
  const auto& d = std::get<pingpong_data<h2::model>>(c.evidence);
  double delta_hat = four_point_delta(h2::sample_ball(d.x_minus, 4.0, 60, 7)).delta_hat;
  pingpong_sampling plan;
  auto wide = pingpong_lemma_sets(d, 65 * delta_hat, plan);
  auto control = pingpong_lemma_sets(d, 0.0, plan);
  return {wide.samples == 1000 && wide.overlaps == 0 && control.overlaps > 0,
          "T = 65 * " + fmt("%.4f", delta_hat) + ": " + std::to_string(wide.overlaps) + " overlaps in " +
              std::to_string(wide.samples) + " samples; T = 0 control: " + std::to_string(control.overlaps) +
              " overlaps"};
}

outcome free_certificate_check() {
  h2::model m;
  auto t0 = clock_type::now();
  auto r = tits_witness(m, shipped_a, shipped_b);
  double secs = seconds_since(t0);
  const auto& c = r.certificate;
  // rerun the oracle on the certified generators a^N, w^N to count the products
  auto orc = word_oracle(m, c.generators, 8, word_kind::group);
  bool ok = r.N == 56 && c.valid && c.oracle_passed && c.oracle_depth == 8 && orc.passed &&
            orc.words_checked == reduced_word_count(2, 8) && secs < 30;
  return {ok, "N = " + std::to_string(r.N) + ", valid " + (c.valid ? "yes" : "no") + ", oracle depth " +
                  std::to_string(c.oracle_depth) + " over " + std::to_string(orc.words_checked) + " words, " +
                  fmt("%.2f", secs) + " s"};
}

outcome sanov_oracle() {
  h2::model m;
  auto pass = word_oracle(m, {h2::matrix(1, 2, 0, 1), h2::matrix(1, 0, 2, 1)}, 8, word_kind::group);
  auto fail = word_oracle(m, {h2::rotation(std::acos(-1.0) / 4)}, 8, word_kind::group);
  std::string ce = fail.counterexample ? words::format(*fail.counterexample, 1) : "none";
  return {pass.passed && !fail.passed && ce == "a^4",
          std::string("Sanov pair ") + (pass.passed ? "free" : "not free") + " to depth 8; order-4 control " + ce};
}

outcome entropy() {
  std::vector<double> radii;
  for (int R = 1; R <= 12; ++R) radii.push_back(R);
  auto tree = regular_tree_entropy(4, radii);
  ftree::free_tree t{2};
  auto orbit = orbit_entropy(t, {word{1}, word{2}}, word{}, radii, 12);
  auto s = ftree::sample_ball(t, word{}, 4, 1000);
  const double target = std::log(3.0);
  bool ok = std::fabs(tree.estimate - target) <= 0.05 * target && std::fabs(orbit.estimate - target) <= 0.05 * target;
  std::string E0s;
  for (double r0 : {0.5, 1.0}) {
    bounds_config c;
    c.r0 = r0;
    c.P0 = static_cast<double>(verified_packing_constant(s, r0));
    auto chk = entropy_bounds_check(c, std::max(tree.estimate, orbit.estimate), entropy_context::group_nonelementary);
    ok = ok && chk.passed();
    E0s += (E0s.empty() ? "" : ", ") + fmt("%.4f", chk.E0);
  }
  return {ok, "ball counts " + fmt("%.5f", tree.estimate) + ", orbit counts " + fmt("%.5f", orbit.estimate) +
                  " vs log 3 = " + fmt("%.5f", target) + "; E0 at r0 = 0.5, 1: " + E0s};
}

outcome overlap_bound() {
  const double r = 0.1 / 37;
  std::string worst;
  bool ok = true;
  int fixtures = 0;
  auto check = [&](const std::string& name, double overlap, double ell) {
    ++fixtures;
    ok = ok && overlap < 5 * ell + 0.05;
    worst += (worst.empty() ? "" : ", ") + name + " " + fmt("%.4f", overlap) + " < " + fmt("%.4f", 5 * ell + 0.05);
  };
  h2::model m;
  for (const char* name : {"schottky.json", "thin_family.json"}) {
    auto g = io::parse_group_input(io::read_json_file(fixture(name).string()));
    auto res = tits_witness(m, g.h2_gens[0], g.h2_gens[1]);
    if (!res.certificate.valid) continue;
    auto partner = evaluate(m, g.h2_gens, res.w);
    double ell = std::max(classify(m, g.h2_gens[0]).ell, classify(m, partner).ell);
    check(name, overlap_arclength(axis(m, g.h2_gens[0]), axis(m, partner), r), ell);
  }
  ftree::free_tree t{2};
  tits_config tree_cfg;
  tree_cfg.delta = 0;
  auto tres = tits_witness(t, word{1}, word{2}, tree_cfg);
  if (tres.certificate.valid)
    check("free_tree.json", overlap_arclength(t, axis(t, word{1}), axis(t, word{2}), r), 1.0);
  return {ok && fixtures == 3, std::to_string(fixtures) + " certified fixtures: " + worst};
}

outcome systole() {
  h2::model m;
  bounds_config c;
  auto sch = io::parse_group_input(io::read_json_file(fixture("schottky.json").string()));
  auto pts = h2::sample_ball_points({0, 1}, 3.0, 200, 3);
  auto st = compute_action_stats(m, sch.h2_gens, pts, c);
  double floor_s = systole_floor(c, st.nilrad_plus_estimate);
  bool ok = st.nilrad_plus_estimate == no_thin_part && floor_s == c.eps0 && st.sys_free_min >= c.eps0;

  auto thin = io::parse_group_input(io::read_json_file(fixture("thin_family.json").string()));
  std::vector<h2::point> tp;
  for (const auto& p : thin.sample.at("points")) tp.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  auto tt = compute_action_stats(m, thin.h2_gens, tp, c);
  double floor_t = systole_floor(c, tt.nilrad_plus_estimate);
  ok = ok && tt.nilrad_plus_estimate != no_thin_part && tt.sys_free_min >= floor_t - 1e-6;
  return {ok, "Schottky: floor " + fmt("%g", floor_s) + ", sys_free " + fmt("%.4f", st.sys_free_min) +
                  "; thin family: sys_free " + fmt("%.6f", tt.sys_free_min) + " >= floor " + fmt("%.6f", floor_t)};
}

outcome degeneration() {
  auto family_json = io::read_json_file(fixture("degenerate.json").string());
  auto fam = make_degeneration(shipped_a, family_json.value("D_offset", 2.0));
  auto path = degeneration_path(fam, family_json.value("steps", 41), family_json.value("word_cap", 3));
  const std::size_t from = path.size() - path.size() / 4 - 1;
  bool monotone = true;
  for (std::size_t k = from + 1; k < path.size(); ++k)
    monotone = monotone && path[k].ell < path[k - 1].ell + 1e-15 &&
               std::fabs(std::fabs(path[k].trace) - 2) <= std::fabs(std::fabs(path[k - 1].trace) - 2) + 1e-15;
  const auto& last = path.back();
  double gap = std::fabs(std::fabs(last.trace) - 2);
  return {monotone && gap < 1e-3 && last.ell < 1e-2,
          "last quarter monotone " + std::string(monotone ? "yes" : "no") + ", final |trace - 2| = " +
              fmt("%.2e", gap) + ", ell = " + fmt("%.2e", last.ell)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

outcome determinism() {
  std::ifstream cases(fixture("golden/cases.txt"));
  auto dir = fs::temp_directory_path() / "hypcert_acceptance";
  fs::create_directories(dir);
  std::string line;
  int runs = 0, identical = 0;
  while (std::getline(cases, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string name, ext, args;
    ss >> name >> ext;
    std::getline(ss, args);
    std::string outs[2];
    for (int k = 0; k < 2; ++k) {
      auto out = dir / (name + std::to_string(k) + "." + ext);
      std::string cmd = "cd \"" HYPCERT_ROOT "\" && \"" HYPCERT_CLI "\" " + args + " --out \"" + out.string() +
                        "\" >/dev/null 2>&1";
      int rc = std::system(cmd.c_str());
      outs[k] = (WIFEXITED(rc) && WEXITSTATUS(rc) == 0) ? slurp(out) : std::string();
      if (ext == "csv") outs[k] += slurp(out.string() + ".manifest.json");
    }
    ++runs;
    identical += !outs[0].empty() && outs[0] == outs[1];
  }
  return {runs > 0 && identical == runs,
          std::to_string(identical) + "/" + std::to_string(runs) + " commands byte-identical on rerun"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<outcome()>>> criteria{
      {"tree exactness", tree_exactness},
      {"grid non-hyperbolicity", grid_growth},
      {"exact packing", exact_packing},
      {"propagation bound", propagation},
      {"classification cross-check", classification},
      {"Margulis gap", margulis_gap},
      {"ping-pong disjointness", pingpong_sets},
      {"free certificate", free_certificate_check},
      {"Sanov oracle", sanov_oracle},
      {"entropy", entropy},
      {"overlap bound", overlap_bound},
      {"systole consistency", systole},
      {"degeneration", degeneration},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("AC%02zu %s %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(), o.detail.c_str());
  }
  return failures == 0 ? 0 : 1;
}
