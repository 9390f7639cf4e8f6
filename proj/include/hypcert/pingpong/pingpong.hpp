#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hypcert/analysis/classify.hpp"
#include "hypcert/error.hpp"
#include "hypcert/model/free_tree.hpp"
#include "hypcert/model/h2.hpp"
#include "hypcert/pingpong/oracle.hpp"
#include "hypcert/rng.hpp"

namespace hypcert {

// ---------------------------------------------------------------------------
// Scalar-generic H2 helpers (only traces and fixed points are needed here).

namespace detail {

template <class Real, class F>
Real golden_min_r(F&& f, Real lo, Real hi, int iters = 240) {
  using std::sqrt;
  const Real inv_phi = (sqrt(Real(5)) - Real(1)) / Real(2);
  Real x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  Real f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < iters; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

}  // namespace detail

template <class Real>
Real translation_length(const h2::basic_moebius<Real>& g) {
  using std::fabs;
  Real t = fabs(g.trace());
  return t > Real(2) ? Real(2) * h2::detail::acosh_(t / Real(2)) : Real(0);
}

template <class Real>
isometry_kind trace_kind(const h2::basic_moebius<Real>& g, double band = 1e-9) {
  using std::fabs;
  Real t = fabs(g.trace());
  if (fabs(t - Real(2)) <= Real(band)) return isometry_kind::parabolic;
  return t > Real(2) ? isometry_kind::hyperbolic : isometry_kind::elliptic;
}

/// Oriented axis (repelling to attracting fixed point) of a hyperbolic map.
template <class Real>
h2::basic_line<Real> hyperbolic_axis(const h2::basic_moebius<Real>& g) {
  using std::fabs;
  using std::sqrt;
  if (trace_kind(g) != isometry_kind::hyperbolic) throw domain_error("axis requested for a non-hyperbolic isometry");
  using B = h2::basic_boundary<Real>;
  Real tr = g.a + g.d;
  Real disc = sqrt(tr * tr - Real(4));
  B r1, r2;
  if (g.c == Real(0)) {
    r1 = B::at_infinity();
    r2 = B{g.b / (g.d - g.a), false};
  } else {
    Real amd = g.a - g.d;
    Real q = amd + (amd >= Real(0) ? disc : Real(-disc));
    r1 = B{q / (Real(2) * g.c), false};
    r2 = B{Real(-2) * g.b / q, false};
  }
  auto attracting = [&](const B& u) {
    if (u.infinite) return fabs(g.a) > fabs(g.d);
    return fabs(g.c * u.x + g.d) > Real(1);
  };
  if (attracting(r1)) return h2::basic_line<Real>::from_endpoints(r2, r1);
  return h2::basic_line<Real>::from_endpoints(r1, r2);
}

// ---------------------------------------------------------------------------
// Endpoint projections

/**
 * @brief Projections x-, x+ of the endpoints of beta onto alpha, with beta
 * reoriented (b replaced by b^-1) so that x+ follows x-; y-, y+ are the
 * projections of x-, x+ back onto beta.
 */
template <class Model>
struct endpoint_data {
  using real = typename Model::real;
  typename Model::line alpha{};
  typename Model::line beta{};
  real s_minus{0}, s_plus{0};  // x-+ = alpha(s-+)
  real u_minus{0}, u_plus{0};  // y-+ = beta(u-+)
  real M0{0};
  bool swapped = false;
};

namespace detail {
template <class Real>
Real boundary_param(const h2::basic_line<Real>& l, const h2::basic_boundary<Real>& u) {
  using std::fabs;
  using std::log;
  auto w = h2::apply(h2::inverse(l.frame), u);
  if (w.infinite || w.x == Real(0)) throw elementary_error("axes share a boundary endpoint");
  return log(fabs(w.x));
}
}  // namespace detail

template <class Real>
endpoint_data<h2::basic_model<Real>> endpoint_projections(const h2::basic_model<Real>&,
                                                          const h2::basic_line<Real>& alpha,
                                                          const h2::basic_line<Real>& beta) {
  for (const auto& u : {beta.start(), beta.end()})
    for (const auto& v : {alpha.start(), alpha.end()})
      if (h2::same_boundary(u, v, 1e-12)) throw elementary_error("axes share a boundary endpoint");
  endpoint_data<h2::basic_model<Real>> e;
  e.alpha = alpha;
  e.beta = beta;
  Real s1 = detail::boundary_param(alpha, beta.start());
  Real s2 = detail::boundary_param(alpha, beta.end());
  if (s2 < s1) {
    e.beta = beta.reversed();
    e.swapped = true;
    std::swap(s1, s2);
  }
  e.s_minus = s1;
  e.s_plus = s2;
  e.M0 = s2 - s1;
  e.u_minus = e.beta.foot_param(alpha.point_at(s1));
  e.u_plus = e.beta.foot_param(alpha.point_at(s2));
  return e;
}

inline ftree::axis_line reversed(const ftree::axis_line& ax) { return {ax.conj, words::inverse(ax.core)}; }

inline endpoint_data<ftree::free_tree> endpoint_projections(const ftree::free_tree& t, const ftree::axis_line& alpha,
                                                            const ftree::axis_line& beta) {
  for (const auto& u : {beta.minus(), beta.plus()})
    for (const auto& v : {alpha.minus(), alpha.plus()})
      if (u == v) throw elementary_error("axes share a boundary endpoint");
  endpoint_data<ftree::free_tree> e;
  e.alpha = alpha;
  e.beta = beta;
  long s1 = ftree::boundary_projection_param(t, alpha, beta.minus());
  long s2 = ftree::boundary_projection_param(t, alpha, beta.plus());
  if (s2 < s1) {
    e.beta = reversed(beta);
    e.swapped = true;
    std::swap(s1, s2);
  }
  e.s_minus = static_cast<double>(s1);
  e.s_plus = static_cast<double>(s2);
  e.M0 = static_cast<double>(s2 - s1);
  e.u_minus = static_cast<double>(ftree::project_param(t, e.beta, alpha.point_at(s1)));
  e.u_plus = static_cast<double>(ftree::project_param(t, e.beta, alpha.point_at(s2)));
  return e;
}

// ---------------------------------------------------------------------------
// Explicit power threshold

template <class Model>
struct pingpong_setup {
  typename Model::isometry a{}, b{};  // b already reoriented
  double ell = 0.0;
  double delta = 0.0;
  long N_min = 1;
  endpoint_data<Model> ends;
};

inline long free_power_formula(double M0, double delta, double ell) {
  if (!(ell > 0)) throw domain_error("translation length must be positive");
  double q = (M0 + 77.0 * delta) / ell;
  long n = static_cast<long>(std::ceil(q - 1e-9));
  return std::max(1L, n);
}

template <class Model>
pingpong_setup<Model> make_pingpong_setup(const Model& m, const typename Model::isometry& a,
                                          const typename Model::isometry& b, double delta) {
  if (delta < 0) throw input_error("delta must be nonnegative");
  auto pa = classify(m, a), pb = classify(m, b);
  if (pa.kind != isometry_kind::hyperbolic || pb.kind != isometry_kind::hyperbolic)
    throw domain_error("ping-pong certification needs two hyperbolic isometries");
  if (std::fabs(pa.ell - pb.ell) > 1e-9 * std::max(1.0, pa.ell))
    throw precondition_error("translation lengths differ; replace b by b a b^-1 first");
  pingpong_setup<Model> s;
  s.ends = endpoint_projections(m, *pa.axis, *pb.axis);
  s.a = a;
  s.b = s.ends.swapped ? m.inverse(b) : b;
  s.ell = pa.ell;
  s.delta = delta;
  s.N_min = free_power_formula(static_cast<double>(s.ends.M0), delta, s.ell);
  return s;
}

/// N = ceil((M0 + 77 delta) / ell), at least 1.
template <class Model>
long min_free_power(const Model& m, const typename Model::isometry& a, const typename Model::isometry& b,
                    double delta) {
  return make_pingpong_setup(m, a, b, delta).N_min;
}

// ---------------------------------------------------------------------------
// Schottky margin

template <class Model>
struct separation_check {
  typename Model::point candidate{};
  bool holds = false;
  double worst_margin = 0;  // min over (p, q) of d(a^p x, b^q x) - max(...) - 2 delta
  long worst_p = 0, worst_q = 0;
};

template <class Model>
struct schottky_margin_result {
  double L_hat = std::numeric_limits<double>::infinity();
  double threshold = 0;
  bool passes = false;
  int power_cap = 0;
  bool one_sided = false;
  std::size_t grid_points = 0;
  std::optional<typename Model::point> argmin;
  std::optional<separation_check<Model>> separation;
  std::vector<std::string> notes;
};

struct margin_budget {
  int power_cap = 6;
  bool one_sided = false;
  // H2 grid in Fermi coordinates around the common perpendicular
  int along = 61;
  int across = 21;
  double margin = 3.0;
  double width = 3.0;
  // tree grid: ball of this radius about the identity
  long tree_radius = 6;
  int sweep = 65;
};

namespace detail {

template <class Model>
std::vector<long> margin_powers(const margin_budget& b) {
  std::vector<long> ps;
  for (long p = 1; p <= b.power_cap; ++p) {
    ps.push_back(p);
    if (!b.one_sided) ps.push_back(-p);
  }
  return ps;
}

template <class Real>
std::vector<h2::basic_point<Real>> h2_margin_grid(const h2::basic_moebius<Real>& a, const h2::basic_moebius<Real>& b,
                                                  const margin_budget& bud) {
  using P = h2::basic_point<Real>;
  using std::cosh;
  using std::exp;
  using std::tanh;
  std::vector<P> out;
  auto fermi = [&](const h2::basic_line<Real>& l, Real s, Real h) {
    return h2::apply(l.frame, P{exp(s) * tanh(h), exp(s) / cosh(h)});
  };
  auto grid_on = [&](const h2::basic_line<Real>& l, Real s0, Real s1) {
    for (int i = 0; i < bud.along; ++i) {
      Real s = s0 - Real(bud.margin) +
               (s1 - s0 + Real(2 * bud.margin)) * Real(i) / Real(std::max(1, bud.along - 1));
      for (int j = 0; j < bud.across; ++j) {
        Real h = Real(-bud.width) + Real(2 * bud.width) * Real(j) / Real(std::max(1, bud.across - 1));
        out.push_back(fermi(l, s, h));
      }
    }
  };
  if (trace_kind(a) == isometry_kind::hyperbolic && trace_kind(b) == isometry_kind::hyperbolic) {
    auto alpha = hyperbolic_axis(a), beta = hyperbolic_axis(b);
    Real lo(-10), hi(10);
    try {
      Real s1 = boundary_param(alpha, beta.start()), s2 = boundary_param(alpha, beta.end());
      lo = (s1 < s2 ? s1 : s2) - Real(1);
      hi = (s1 < s2 ? s2 : s1) + Real(1);
    } catch (const elementary_error&) {
    }
    Real s = golden_min_r<Real>([&](const Real& t) { return beta.distance_to(alpha.point_at(t)); }, lo, hi);
    P xa = alpha.point_at(s);
    P xb = beta.point_at(beta.foot_param(xa));
    if (h2::distance(xa, xb) < Real(1e-9)) {
      grid_on(alpha, s, s);
    } else {
      auto seg = h2::segment(xa, xb);
      grid_on(seg.line, seg.t0, seg.t1);
    }
  } else {
    // parabolic generators: a Fermi grid around the base point
    h2::basic_line<Real> l{};
    grid_on(l, Real(-bud.margin), Real(bud.margin));
  }
  return out;
}

template <class Model, class Real>
Real min_displacement_over(const Model& m, const std::vector<typename Model::isometry>& pw,
                           const typename Model::point& x) {
  Real best = std::numeric_limits<Real>::infinity();
  for (const auto& g : pw) {
    Real d = Real(m.distance(x, m.apply(g, x)));
    if (d < best) best = d;
  }
  return best;
}

}  // namespace detail

/**
 * @brief Sampled Margulis constant of the couple,
 * L_hat = min over grid x of max(min_p d(x, a^p x), min_q d(x, b^q x)),
 * against max(ell(a), ell(b)) + 56 delta, plus the Schottky-position test at
 * a sweep point between the two generalised domains.
 */
template <class Model>
schottky_margin_result<Model> schottky_margin(const Model& m, const typename Model::isometry& a,
                                              const typename Model::isometry& b, double delta,
                                              const margin_budget& bud = {},
                                              std::vector<typename Model::point> grid = {}) {
  using real = typename Model::real;
  using point = typename Model::point;
  if (bud.power_cap < 1) throw input_error("power cap must be at least 1");
  double la = 0, lb = 0;
  if constexpr (std::is_same_v<Model, ftree::free_tree>) {
    if (a.empty() || b.empty()) throw precondition_error("Schottky margin needs non-elliptic isometries");
    la = classify(m, a).ell;
    lb = classify(m, b).ell;
    if (grid.empty()) grid = m.ball(word{}, bud.tree_radius);
  } else {
    if (trace_kind(a) == isometry_kind::elliptic || trace_kind(b) == isometry_kind::elliptic ||
        m.is_identity(a) || m.is_identity(b))
      throw precondition_error("Schottky margin needs non-elliptic isometries");
    la = static_cast<double>(translation_length(a));
    lb = static_cast<double>(translation_length(b));
    if (grid.empty()) grid = detail::h2_margin_grid(a, b, bud);
  }
  schottky_margin_result<Model> r;
  r.power_cap = bud.power_cap;
  r.one_sided = bud.one_sided;
  r.grid_points = grid.size();
  r.threshold = std::max(la, lb) + 56.0 * delta;
  std::vector<typename Model::isometry> pa, pb;
  std::vector<long> expo = detail::margin_powers<Model>(bud);
  for (long p : expo) {
    pa.push_back(m.power(a, p));
    pb.push_back(m.power(b, p));
  }
  std::vector<real> da(grid.size()), db(grid.size());
  real best = std::numeric_limits<real>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    da[i] = detail::min_displacement_over<Model, real>(m, pa, grid[i]);
    db[i] = detail::min_displacement_over<Model, real>(m, pb, grid[i]);
    real v = da[i] > db[i] ? da[i] : db[i];
    if (v < best) {
      best = v;
      r.argmin = grid[i];
    }
  }
  r.L_hat = static_cast<double>(best);
  r.passes = r.L_hat > r.threshold;

  // generalised domains at level l0 = max ell + delta + eps, nearest pair, sweep
  const double eps = delta > 0 ? 0.5 * delta : 0.5;
  const real l0 = real(std::max(la, lb) + delta + eps);
  std::optional<std::size_t> bi, bj;
  real bd = std::numeric_limits<real>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(da[i] <= l0)) continue;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      if (!(db[j] <= l0)) continue;
      real d = real(m.distance(grid[i], grid[j]));
      if (d < bd) {
        bd = d;
        bi = i;
        bj = j;
      }
    }
  }
  if (!bi) {
    r.notes.push_back("a generalised domain has no grid point; Schottky-position test skipped");
    return r;
  }
  const point& x0 = grid[*bi];
  const point& y0 = grid[*bj];
  point cand = x0;
  real cand_val = real(-1);
  for (int k = 0; k < bud.sweep; ++k) {
    real s = bd * real(k) / real(std::max(1, bud.sweep - 1));
    point x = m.geodesic_point(x0, y0, s);
    real va = detail::min_displacement_over<Model, real>(m, pa, x);
    real vb = detail::min_displacement_over<Model, real>(m, pb, x);
    real v = va < vb ? va : vb;
    if (v > cand_val) {
      cand_val = v;
      cand = x;
    }
  }
  separation_check<Model> e;
  e.candidate = cand;
  real worst = std::numeric_limits<real>::infinity();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    point ax = m.apply(pa[i], cand);
    real dax = real(m.distance(cand, ax));
    for (std::size_t j = 0; j < pb.size(); ++j) {
      point bx = m.apply(pb[j], cand);
      real dbx = real(m.distance(cand, bx));
      real gap = real(m.distance(ax, bx)) - (dax > dbx ? dax : dbx) - real(2 * delta);
      if (gap < worst) {
        worst = gap;
        e.worst_p = expo[i];
        e.worst_q = expo[j];
      }
    }
  }
  e.worst_margin = static_cast<double>(worst);
  e.holds = worst > real(0);
  r.separation = e;
  return r;
}

// ---------------------------------------------------------------------------
// Sampled ping-pong sets

struct pingpong_sampling {
  std::size_t n = 1000;
  double radius = 0.0;  // 0 means 3 (M0 + N ell)
  double tube_fraction = 0.25;
  double tube_width = 2.0;
  std::uint64_t seed = 1;
};

enum pingpong_set : unsigned { set_a_plus = 1, set_a_minus = 2, set_b_plus = 4, set_b_minus = 8 };

inline const char* set_name(unsigned bit) {
  switch (bit) {
    case set_a_plus: return "A+";
    case set_a_minus: return "A-";
    case set_b_plus: return "B+";
    case set_b_minus: return "B-";
  }
  return "?";
}

struct set_census {
  std::size_t samples = 0;
  std::size_t a_plus = 0, a_minus = 0, b_plus = 0, b_minus = 0;
  std::size_t outside = 0;   // in none of the four sets
  std::size_t overlaps = 0;  // in two or more
  std::optional<std::size_t> first_overlap;
  unsigned first_overlap_mask = 0;
  bool disjoint() const { return overlaps == 0; }
};

template <class Model>
struct pingpong_data {
  typename Model::isometry a{}, b{};
  typename Model::line alpha{}, beta{};
  typename Model::point x_minus{}, x_plus{}, y_minus{}, y_plus{};
  double s_minus = 0, s_plus = 0, u_minus = 0, u_plus = 0;
  double M0 = 0;
  double delta = 0;
  double ell = 0;
  long N = 0;
  long N_min = 0;
  bool swapped = false;
  double radius = 0;
  std::uint64_t seed = 0;
  set_census sets;
  std::size_t nesting_checks = 0;
  std::size_t nesting_violations = 0;
  std::optional<typename Model::point> offending;
  std::string offending_reason;
  bool passed() const { return sets.disjoint() && nesting_violations == 0; }
};

namespace detail {

/// Sample points kept in the frames of both axes, so far-out points stay exact.
struct h2_frame_sample {
  h2::point wa;  // alpha frame
  h2::point wb;  // beta frame
};

struct h2_geometry {
  h2::moebius alpha_frame, beta_frame, alpha_to_beta;
  double ell = 0;

  h2_frame_sample from_alpha(const h2::point& wa) const { return {wa, h2::apply(alpha_to_beta, wa)}; }
  h2_frame_sample from_beta(const h2::point& wb) const { return {h2::apply(h2::inverse(alpha_to_beta), wb), wb}; }
  h2::point world(const h2_frame_sample& z) const { return h2::apply(alpha_frame, z.wa); }

  double dist_alpha(const h2_frame_sample& z, double s) const { return h2::distance(z.wa, h2::point{0.0, std::exp(s)}); }
  double dist_beta(const h2_frame_sample& z, double u) const { return h2::distance(z.wb, h2::point{0.0, std::exp(u)}); }

  // a^k and b^k act as dilations by e^{k ell} in their own frames
  h2_frame_sample move_a(const h2_frame_sample& z, long k) const {
    double f = std::exp(static_cast<double>(k) * ell);
    return from_alpha({z.wa.x * f, z.wa.y * f});
  }
  h2_frame_sample move_b(const h2_frame_sample& z, long k) const {
    double f = std::exp(static_cast<double>(k) * ell);
    return from_beta({z.wb.x * f, z.wb.y * f});
  }
};

struct tree_geometry {
  const ftree::free_tree* t;
  ftree::axis_line alpha, beta;
  word a, b;

  double dist_alpha(const word& z, double s) const { return t->distance(z, alpha.point_at(std::lround(s))); }
  double dist_beta(const word& z, double u) const { return t->distance(z, beta.point_at(std::lround(u))); }
  word move_a(const word& z, long k) const { return words::multiply(words::power(a, k), z); }
  word move_b(const word& z, long k) const { return words::multiply(words::power(b, k), z); }
};

struct set_params {
  // set X = {z : d(z, near) <= d(z, far)} on the given axis
  double ap_near, ap_far, am_near, am_far, bp_near, bp_far, bm_near, bm_far;
};

template <class Geo, class Sample>
unsigned membership(const Geo& g, const Sample& z, const set_params& p) {
  unsigned mask = 0;
  if (g.dist_alpha(z, p.ap_near) <= g.dist_alpha(z, p.ap_far)) mask |= set_a_plus;
  if (g.dist_alpha(z, p.am_near) <= g.dist_alpha(z, p.am_far)) mask |= set_a_minus;
  if (g.dist_beta(z, p.bp_near) <= g.dist_beta(z, p.bp_far)) mask |= set_b_plus;
  if (g.dist_beta(z, p.bm_near) <= g.dist_beta(z, p.bm_far)) mask |= set_b_minus;
  return mask;
}

template <class Geo, class Sample>
set_census census(const Geo& g, const std::vector<Sample>& samples, const set_params& p) {
  set_census c;
  c.samples = samples.size();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    unsigned mask = membership(g, samples[i], p);
    c.a_plus += (mask & set_a_plus) != 0;
    c.a_minus += (mask & set_a_minus) != 0;
    c.b_plus += (mask & set_b_plus) != 0;
    c.b_minus += (mask & set_b_minus) != 0;
    int bits = __builtin_popcount(mask);
    if (bits == 0) ++c.outside;
    if (bits >= 2) {
      if (!c.first_overlap) {
        c.first_overlap = i;
        c.first_overlap_mask = mask;
      }
      ++c.overlaps;
    }
  }
  return c;
}

template <class Data>
set_params proof_sets(const Data& d) {
  const double t = static_cast<double>(d.N) * d.ell;
  return {d.s_minus + t, d.s_plus, d.s_plus - t, d.s_minus, d.u_minus + t, d.u_plus, d.u_plus - t, d.u_minus};
}

template <class Data>
set_params lemma_sets(const Data& d, double T) {
  return {d.s_plus + T, d.s_plus, d.s_minus - T, d.s_minus, d.u_plus + T, d.u_plus, d.u_minus - T, d.u_minus};
}

inline std::string mask_names(unsigned mask) {
  std::string out;
  for (unsigned bit : {set_a_plus, set_a_minus, set_b_plus, set_b_minus})
    if (mask & bit) out += std::string(out.empty() ? "" : ",") + set_name(bit);
  return out;
}

template <class Geo, class Sample, class Data, class World>
void run_pingpong_checks(const Geo& g, const std::vector<Sample>& samples, Data& d, World&& world) {
  const set_params p = proof_sets(d);
  d.sets = census(g, samples, p);
  if (d.sets.first_overlap) {
    d.offending = world(samples[*d.sets.first_overlap]);
    d.offending_reason = "point lies in " + mask_names(d.sets.first_overlap_mask);
  }
  // a^N (X \ A-) in A+, a^-N (X \ A+) in A-, and the same for b
  for (const auto& z : samples) {
    unsigned mask = membership(g, z, p);
    struct rule {
      unsigned outside_of, lands_in;
      bool use_a;
      long k;
    };
    const rule rules[] = {{set_a_minus, set_a_plus, true, d.N},
                          {set_a_plus, set_a_minus, true, -d.N},
                          {set_b_minus, set_b_plus, false, d.N},
                          {set_b_plus, set_b_minus, false, -d.N}};
    for (const auto& r : rules) {
      if (mask & r.outside_of) continue;
      ++d.nesting_checks;
      Sample moved = r.use_a ? g.move_a(z, r.k) : g.move_b(z, r.k);
      if (!(membership(g, moved, p) & r.lands_in)) {
        if (d.nesting_violations == 0 && !d.offending) {
          d.offending = world(z);
          d.offending_reason = std::string("nesting fails: image not in ") + set_name(r.lands_in);
        }
        ++d.nesting_violations;
      }
    }
  }
}

inline std::vector<h2_frame_sample> h2_samples(const h2_geometry& g, const pingpong_data<h2::model>& d,
                                               const pingpong_sampling& plan) {
  std::vector<h2_frame_sample> out;
  const std::size_t n_tube = static_cast<std::size_t>(std::llround(plan.tube_fraction * static_cast<double>(plan.n)));
  const std::size_t n_ball = plan.n > n_tube ? plan.n - n_tube : 0;
  const h2::point centre{0.0, std::exp(d.s_minus)};
  if (n_ball > 0)
    for (const auto& w : h2::sample_ball_points(centre, d.radius, n_ball, plan.seed)) out.push_back(g.from_alpha(w));
  rng gen(plan.seed ^ 0x9e3779b97f4a7c15ULL);
  for (std::size_t k = 0; k < n_tube; ++k) {
    bool on_alpha = (k % 2) == 0;
    double mid = on_alpha ? 0.5 * (d.s_minus + d.s_plus) : 0.5 * (d.u_minus + d.u_plus);
    double s = gen.uniform(mid - d.radius, mid + d.radius);
    double h = gen.uniform(-plan.tube_width, plan.tube_width);
    h2::point w{std::exp(s) * std::tanh(h), std::exp(s) / std::cosh(h)};
    out.push_back(on_alpha ? g.from_alpha(w) : g.from_beta(w));
  }
  return out;
}

}  // namespace detail

template <class Model>
struct free_certificate;

/// Census of the four lemma sets A+(T), A-(T), B+(T), B-(T) on the certificate sample.
inline set_census pingpong_lemma_sets(const pingpong_data<h2::model>& d, double T, const pingpong_sampling& plan) {
  detail::h2_geometry g{d.alpha.frame, d.beta.frame, h2::inverse(d.beta.frame) * d.alpha.frame, d.ell};
  auto samples = detail::h2_samples(g, d, plan);
  return detail::census(g, samples, detail::lemma_sets(d, T));
}

inline set_census pingpong_lemma_sets(const ftree::free_tree& t, const pingpong_data<ftree::free_tree>& d, double T,
                                      const pingpong_sampling& plan) {
  detail::tree_geometry g{&t, d.alpha, d.beta, d.a, d.b};
  auto pts = t.ball(d.x_minus, std::lround(d.radius));
  if (pts.size() > plan.n) pts.resize(plan.n);
  return detail::census(g, pts, detail::lemma_sets(d, std::round(T)));
}

template <class Model>
struct free_certificate {
  word_kind kind = word_kind::group;
  std::vector<typename Model::isometry> generators;
  long N = 1;
  word witness;  // w as a word in a, b
  std::variant<std::monostate, pingpong_data<Model>, schottky_margin_result<Model>> evidence;
  int oracle_depth = 0;
  bool oracle_passed = false;
  std::optional<word> oracle_counterexample;
  bool geometric_passed = false;
  bool geometric_checked = false;
  bool valid = false;
  std::vector<std::string> notes;
};

inline constexpr int minimal_group_oracle_depth = 6;

namespace detail {
template <class Model>
void finish_certificate(const Model& m, free_certificate<Model>& c, int depth, std::size_t budget) {
  auto orc = word_oracle(m, c.generators, depth, c.kind, budget);
  c.oracle_depth = depth;
  c.oracle_passed = orc.passed;
  c.oracle_counterexample = orc.counterexample;
  c.valid = c.oracle_passed && (!c.geometric_checked || c.geometric_passed);
  if (c.kind == word_kind::group && depth < minimal_group_oracle_depth) {
    c.valid = false;
    c.notes.push_back("group certificates need oracle depth at least 6");
  }
}
}  // namespace detail

/**
 * @brief Ping-pong certificate that <a^N, b^N> is free: sampled disjointness
 * and nesting of the four proof sets, plus the word oracle on (a^N, b^N).
 */
inline free_certificate<h2::model> pingpong_certify(const h2::model& m, const h2::moebius& a, const h2::moebius& b,
                                                    long N, double delta, const pingpong_sampling& plan = {},
                                                    int oracle_depth = 8,
                                                    std::size_t budget = default_word_budget) {
  auto setup = make_pingpong_setup(m, a, b, delta);
  if (N < setup.N_min)
    throw precondition_error("N = " + std::to_string(N) + " is below the free power threshold " +
                             std::to_string(setup.N_min));
  pingpong_data<h2::model> d;
  d.a = setup.a;
  d.b = setup.b;
  d.alpha = setup.ends.alpha;
  d.beta = setup.ends.beta;
  d.s_minus = setup.ends.s_minus;
  d.s_plus = setup.ends.s_plus;
  d.u_minus = setup.ends.u_minus;
  d.u_plus = setup.ends.u_plus;
  d.x_minus = d.alpha.point_at(d.s_minus);
  d.x_plus = d.alpha.point_at(d.s_plus);
  d.y_minus = d.beta.point_at(d.u_minus);
  d.y_plus = d.beta.point_at(d.u_plus);
  d.M0 = setup.ends.M0;
  d.delta = delta;
  d.ell = setup.ell;
  d.N = N;
  d.N_min = setup.N_min;
  d.swapped = setup.ends.swapped;
  d.radius = plan.radius > 0 ? plan.radius : 3.0 * (d.M0 + static_cast<double>(N) * d.ell);
  d.seed = plan.seed;
  detail::h2_geometry g{d.alpha.frame, d.beta.frame, h2::inverse(d.beta.frame) * d.alpha.frame, d.ell};
  auto samples = detail::h2_samples(g, d, plan);
  detail::run_pingpong_checks(g, samples, d, [&](const detail::h2_frame_sample& z) { return g.world(z); });

  free_certificate<h2::model> c;
  c.kind = word_kind::group;
  c.generators = {h2::power(a, N), h2::power(b, N)};
  c.N = N;
  c.witness = word{2};
  c.geometric_checked = true;
  c.geometric_passed = d.passed();
  if (d.swapped) c.notes.push_back("b replaced by b^-1 to orient the axes");
  c.evidence = d;
  detail::finish_certificate(m, c, oracle_depth, budget);
  return c;
}

inline free_certificate<ftree::free_tree> pingpong_certify(const ftree::free_tree& t, const word& a, const word& b,
                                                           long N, double delta,
                                                           const pingpong_sampling& plan = {},
                                                           int oracle_depth = 8,
                                                           std::size_t budget = default_word_budget) {
  auto setup = make_pingpong_setup(t, a, b, delta);
  if (N < setup.N_min)
    throw precondition_error("N = " + std::to_string(N) + " is below the free power threshold " +
                             std::to_string(setup.N_min));
  pingpong_data<ftree::free_tree> d;
  d.a = setup.a;
  d.b = setup.b;
  d.alpha = setup.ends.alpha;
  d.beta = setup.ends.beta;
  d.s_minus = setup.ends.s_minus;
  d.s_plus = setup.ends.s_plus;
  d.u_minus = setup.ends.u_minus;
  d.u_plus = setup.ends.u_plus;
  d.x_minus = d.alpha.point_at(std::lround(d.s_minus));
  d.x_plus = d.alpha.point_at(std::lround(d.s_plus));
  d.y_minus = d.beta.point_at(std::lround(d.u_minus));
  d.y_plus = d.beta.point_at(std::lround(d.u_plus));
  d.M0 = setup.ends.M0;
  d.delta = delta;
  d.ell = setup.ell;
  d.N = N;
  d.N_min = setup.N_min;
  d.swapped = setup.ends.swapped;
  d.radius = plan.radius > 0 ? plan.radius : 3.0 * (d.M0 + static_cast<double>(N) * d.ell);
  d.seed = plan.seed;
  detail::tree_geometry g{&t, d.alpha, d.beta, d.a, d.b};
  auto pts = t.ball(d.x_minus, std::lround(d.radius));
  if (pts.size() > plan.n) pts.resize(plan.n);
  detail::run_pingpong_checks(g, pts, d, [](const word& z) { return z; });

  free_certificate<ftree::free_tree> c;
  c.kind = word_kind::group;
  c.generators = {words::power(a, N), words::power(b, N)};
  c.N = N;
  c.witness = word{2};
  c.geometric_checked = true;
  c.geometric_passed = d.passed();
  if (d.swapped) c.notes.push_back("b replaced by b^-1 to orient the axes");
  c.evidence = d;
  detail::finish_certificate(t, c, oracle_depth, budget);
  return c;
}

// ---------------------------------------------------------------------------
// Axis proximity

/// Arclength of {s : d(alpha(s), beta) <= r}; infinite when the axes coincide.
template <class Real>
double overlap_arclength(const h2::basic_line<Real>& alpha, const h2::basic_line<Real>& beta, double r) {
  auto f = [&](const Real& s) { return beta.distance_to(alpha.point_at(s)); };
  Real lo(-40), hi(40);
  try {
    Real s1 = detail::boundary_param(alpha, beta.start()), s2 = detail::boundary_param(alpha, beta.end());
    lo = (s1 < s2 ? s1 : s2) - Real(2);
    hi = (s1 < s2 ? s2 : s1) + Real(2);
  } catch (const elementary_error&) {
    return std::numeric_limits<double>::infinity();
  }
  Real s0 = detail::golden_min_r<Real>(f, lo, hi);
  if (f(s0) > Real(r)) return 0.0;
  auto edge = [&](Real inside, Real step) {
    Real outside = inside + step;
    int grow = 0;
    while (!(f(outside) > Real(r))) {
      step *= Real(2);
      outside = inside + step;
      if (++grow > 60) return outside;
    }
    for (int it = 0; it < 200; ++it) {
      Real mid = (inside + outside) / Real(2);
      if (f(mid) > Real(r))
        outside = mid;
      else
        inside = mid;
    }
    return inside;
  };
  Real left = edge(s0, Real(-1)), right = edge(s0, Real(1));
  return static_cast<double>(right - left);
}

inline double overlap_arclength(const ftree::free_tree& t, const ftree::axis_line& alpha,
                                const ftree::axis_line& beta, double r) {
  for (const auto& u : {beta.minus(), beta.plus()})
    for (const auto& v : {alpha.minus(), alpha.plus()})
      if (u == v) return std::numeric_limits<double>::infinity();
  const long window =
      4 * static_cast<long>(alpha.conj.size() + beta.conj.size() + alpha.core.size() + beta.core.size()) + 8;
  std::optional<long> first, last;
  for (long s = -window; s <= window; ++s) {
    word x = alpha.point_at(s);
    double d = t.distance(x, ftree::project(t, beta, x));
    if (d <= r) {
      if (!first) first = s;
      last = s;
    }
  }
  if (!first) return 0.0;
  return static_cast<double>(*last - *first);
}

}  // namespace hypcert
