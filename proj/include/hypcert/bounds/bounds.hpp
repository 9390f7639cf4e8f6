#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "hypcert/analysis/classify.hpp"
#include "hypcert/error.hpp"
#include "hypcert/metric/packing.hpp"
#include "hypcert/pingpong/oracle.hpp"
#include "hypcert/tits/tits.hpp"

namespace hypcert {

struct bounds_config {
  double P0 = 4;
  double r0 = 1.0;
  double delta = 1.0;
  double eps0 = 0.1;
  long N = 1;
  double tolerance = 1e-9;

  void validate() const {
    if (!(P0 >= 1)) throw input_error("P0 must be at least 1");
    if (!(r0 > 0)) throw input_error("r0 must be positive");
    if (!(delta >= 0)) throw input_error("delta must be nonnegative");
    if (!(eps0 > 0)) throw input_error("eps0 must be positive");
    if (N < 1) throw input_error("N must be at least 1");
  }
};

struct derived_constants {
  double C0 = 0;
  double E0 = 0;
  double H0 = 0;

  /// Radius below which thin-point subgroups are elementary.
  double R_eps(double eps) const {
    if (!(eps > 0)) throw input_error("eps must be positive");
    return std::log(1.0 / (eps * H0)) / H0;
  }
};

inline derived_constants derive(const bounds_config& c) {
  c.validate();
  derived_constants d;
  d.C0 = std::log(2.0) / static_cast<double>(c.N);
  d.E0 = std::log(1.0 + c.P0) / c.r0;
  d.H0 = d.E0 * static_cast<double>(c.N);
  return d;
}

/// P0 (1 + P0)^(R/r - 1) for r <= r0, and with r0 in place of r above it.
inline double packing_bound(double P0, double r0, double R, double r) {
  if (!(r > 0) || R < r) throw input_error("packing bound needs 0 < r <= R");
  double scale = r <= r0 ? r : r0;
  return P0 * std::pow(1.0 + P0, R / scale - 1.0);
}

/// sup over sample centres of Pack(B(x, 3 r0), r0), exact.
inline std::size_t verified_packing_constant(const sampled_space& s, double r0, std::size_t cap = 64) {
  return packing_function(s, 3.0 * r0, r0, cap);
}

// ---------------------------------------------------------------------------
// Entropy

struct entropy_report {
  std::vector<double> radii;
  std::vector<double> counts;
  std::size_t fit_from = 0;  // first index of the regression window
  double estimate = 0;
  bool partial = false;
  std::string source;
};

/// Least-squares slope of log count against R over the top half of the grid.
inline entropy_report entropy_from_counts(std::vector<double> radii, std::vector<double> counts, std::string source = "") {
  if (radii.size() != counts.size()) throw input_error("radii and counts differ in length");
  if (radii.size() < 3) throw input_error("entropy estimate needs at least 3 radii");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) throw input_error("radii must be increasing");
  for (double c : counts)
    if (!(c >= 1)) throw input_error("counts must be at least 1");
  entropy_report r;
  r.radii = std::move(radii);
  r.counts = std::move(counts);
  r.source = std::move(source);
  r.fit_from = r.radii.size() / 2;
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = r.fit_from; i < r.radii.size(); ++i) {
    double x = r.radii[i], y = std::log(r.counts[i]);
    n += 1;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  r.estimate = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return r;
}

/// Exact ball sizes of the d-regular tree.
inline entropy_report regular_tree_entropy(int d, const std::vector<double>& radii) {
  if (d < 3) throw input_error("regular tree needs degree at least 3");
  std::vector<double> counts;
  for (double R : radii) {
    long k = static_cast<long>(std::floor(R + 1e-9));
    double total = 1, sphere = d;
    for (long n = 1; n <= k; ++n) {
      total += sphere;
      sphere *= d - 1;
    }
    counts.push_back(total);
  }
  return entropy_from_counts(radii, counts, "regular tree degree " + std::to_string(d));
}

/// Orbit counts card(B(x, R) cap Gamma x) over group elements of word length <= word_cap.
template <class Model>
entropy_report orbit_entropy(const Model& m, const std::vector<typename Model::isometry>& gens,
                             const typename Model::point& x, const std::vector<double>& radii, int word_cap,
                             std::size_t budget = default_word_budget) {
  std::vector<double> dist{0.0};
  double frontier = std::numeric_limits<double>::infinity();
  bool partial = false;
  int depth = word_cap;
  if (reduced_word_count(static_cast<int>(gens.size()), word_cap) > budget) {
    // fall back to the deepest complete level the budget allows
    partial = true;
    depth = detail::depth_within(budget, word_cap,
                                 [&](int d) { return reduced_word_count(static_cast<int>(gens.size()), d); });
  }
  if (depth >= 1)
    for_each_reduced_word(static_cast<int>(gens.size()), depth, [&](const word& w) {
      auto g = evaluate(m, gens, w);
      dist.push_back(static_cast<double>(m.distance(x, m.apply(g, x))));
      if (static_cast<int>(w.size()) == depth) frontier = std::min(frontier, dist.back());
      return true;
    }, budget);
  // one orbit point per reduced word; exact for free actions with trivial stabilisers
  std::sort(dist.begin(), dist.end());
  std::vector<double> kept, counts;
  for (double R : radii) {
    // a truncated enumeration undercounts balls reaching the deepest level
    if (partial && R > frontier + 1e-9 && kept.size() >= 3) break;
    kept.push_back(R);
    counts.push_back(static_cast<double>(std::upper_bound(dist.begin(), dist.end(), R + 1e-9) - dist.begin()));
  }
  auto rep = entropy_from_counts(kept, counts, "orbit counts, word length <= " + std::to_string(depth));
  rep.partial = partial;
  return rep;
}

/// Ball sizes of a sampled space (vertex counts of a graph).
inline entropy_report ball_entropy(const sampled_space& s, std::size_t center, const std::vector<double>& radii) {
  std::vector<double> counts;
  for (double R : radii) counts.push_back(static_cast<double>(closed_ball(s, center, R).size()));
  return entropy_from_counts(radii, counts, "ball sizes about " + s.id(center));
}

/// log Pack(B(x, R), r0) growth, exact packings.
inline entropy_report packing_entropy(const sampled_space& s, std::size_t center, double r0,
                                      const std::vector<double>& radii, std::size_t cap = 64) {
  std::vector<double> counts;
  for (double R : radii)
    counts.push_back(static_cast<double>(
        max_separated(s, closed_ball(s, center, R), r0, count_mode::exact, cap).size()));
  return entropy_from_counts(radii, counts, "packing counts at r0 = " + std::to_string(r0));
}

enum class entropy_context { group_nonelementary, space };

struct entropy_bounds_report {
  double measured = 0;
  double C0 = 0;
  double E0 = 0;
  bool lower_checked = false;
  bool lower_pass = true;
  bool upper_pass = true;
  bool passed() const { return lower_pass && upper_pass; }
};

inline entropy_bounds_report entropy_bounds_check(const bounds_config& cfg, double measured, entropy_context ctx) {
  auto d = derive(cfg);
  entropy_bounds_report r;
  r.measured = measured;
  r.C0 = d.C0;
  r.E0 = d.E0;
  r.lower_checked = ctx == entropy_context::group_nonelementary;
  if (r.lower_checked) r.lower_pass = measured >= d.C0 - cfg.tolerance;
  r.upper_pass = measured <= d.E0 + cfg.tolerance;
  return r;
}

// ---------------------------------------------------------------------------
// Systole floor and action statistics

inline constexpr double no_thin_part = -std::numeric_limits<double>::infinity();

inline double systole_floor(double eps0, double H0, double nilrad_plus) {
  if (nilrad_plus == no_thin_part) return eps0;
  if (!(nilrad_plus >= 0)) throw input_error("nilradius must be nonnegative or the empty-thin-part sentinel");
  return std::min(eps0, std::exp(-H0 * nilrad_plus) / H0);
}

inline double systole_floor(const bounds_config& cfg, double nilrad_plus) {
  return systole_floor(cfg.eps0, derive(cfg).H0, nilrad_plus);
}

template <class Model>
struct action_stats {
  std::vector<typename Model::point> sample;
  std::vector<double> sys_at;
  std::vector<double> sys_free_at;
  std::vector<double> nilrad_at;
  std::vector<bool> thin;
  double dias_estimate = 0;
  double sys_free_min = std::numeric_limits<double>::infinity();
  double nilrad_plus_estimate = no_thin_part;
  int word_cap = 0;
  std::size_t elements = 0;
  std::size_t finite_order_excluded = 0;
  std::vector<double> grid;
};

struct action_options {
  int word_cap = 4;
  int torsion_depth = 8;
  int grid_steps = 12;
  std::size_t budget = default_word_budget;
};

/**
 * @brief Word-cap truncated displacement statistics on a sample: sys, sys
 * excluding finite-order elements, diastole, and nilradius on the grid
 * eps0 * 2^k (largest radius whose short elements share a fixed set).
 */
template <class Model>
action_stats<Model> compute_action_stats(const Model& m, const std::vector<typename Model::isometry>& gens,
                                         const std::vector<typename Model::point>& sample, const bounds_config& cfg,
                                         const action_options& opt = {}) {
  cfg.validate();
  if (sample.empty()) throw input_error("action statistics need a nonempty sample");
  struct element {
    typename Model::isometry g;
    bool finite_order = false;
    bool elliptic = false;
    std::vector<typename Model::boundary> fixed;
  };
  std::vector<element> els;
  for_each_reduced_word(static_cast<int>(gens.size()), opt.word_cap, [&](const word& w) {
    auto g = evaluate(m, gens, w);
    if (m.is_identity(g)) return true;
    element e{g, false, false, {}};
    auto prof = classify(m, g);
    e.elliptic = prof.kind == isometry_kind::elliptic;
    if (e.elliptic) e.finite_order = !word_oracle(m, {g}, opt.torsion_depth, word_kind::group, opt.budget).passed;
    e.fixed = prof.fixed_boundary;
    els.push_back(std::move(e));
    return true;
  }, opt.budget);

  action_stats<Model> st;
  st.sample = sample;
  st.word_cap = opt.word_cap;
  st.elements = els.size();
  for (const auto& e : els) st.finite_order_excluded += e.finite_order;
  for (int k = 0; k < opt.grid_steps; ++k) st.grid.push_back(cfg.eps0 * std::pow(2.0, k));

  auto same_set = [](const element& x, const element& y) {
    if (x.fixed.size() != y.fixed.size()) return false;
    for (const auto& u : x.fixed) {
      bool hit = false;
      for (const auto& v : y.fixed) hit = hit || detail::same_point(u, v);
      if (!hit) return false;
    }
    return true;
  };

  for (const auto& x : sample) {
    std::vector<double> disp(els.size());
    double sys = std::numeric_limits<double>::infinity(), sys_free = sys;
    for (std::size_t i = 0; i < els.size(); ++i) {
      disp[i] = static_cast<double>(m.distance(x, m.apply(els[i].g, x)));
      sys = std::min(sys, disp[i]);
      if (!els[i].finite_order) sys_free = std::min(sys_free, disp[i]);
    }
    double nil = 0;
    for (double r : st.grid) {
      const element* first = nullptr;
      bool ok = true;
      for (std::size_t i = 0; i < els.size() && ok; ++i) {
        if (disp[i] > r || els[i].finite_order) continue;
        // an elliptic element of infinite order never shares a boundary set with a translation
        if (els[i].elliptic) {
          ok = false;
          break;
        }
        if (!first)
          first = &els[i];
        else
          ok = same_set(*first, els[i]);
      }
      if (!ok) break;
      nil = r;
    }
    st.sys_at.push_back(sys);
    st.sys_free_at.push_back(sys_free);
    st.nilrad_at.push_back(nil);
    bool thin = sys < cfg.eps0;
    st.thin.push_back(thin);
    st.dias_estimate = std::max(st.dias_estimate, sys);
    st.sys_free_min = std::min(st.sys_free_min, sys_free);
    if (thin) st.nilrad_plus_estimate = std::max(st.nilrad_plus_estimate, nil);
  }
  return st;
}

}  // namespace hypcert
