#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hypcert/analysis/circumcenter.hpp"
#include "hypcert/error.hpp"
#include "hypcert/model/free_tree.hpp"
#include "hypcert/model/h2.hpp"
#include "hypcert/model/metric_graph.hpp"

namespace hypcert {

enum class isometry_kind { elliptic, parabolic, hyperbolic };

inline const char* to_string(isometry_kind k) {
  switch (k) {
    case isometry_kind::elliptic: return "elliptic";
    case isometry_kind::parabolic: return "parabolic";
    case isometry_kind::hyperbolic: return "hyperbolic";
  }
  return "?";
}

template <class Model>
struct isometry_profile {
  isometry_kind kind = isometry_kind::elliptic;
  double ell = 0.0;         // minimal displacement
  double asymptotic = 0.0;  // orbit growth rate
  double orbit_rate = 0.0;  // raw orbit-limit diagnostic at n = 2^10
  std::optional<typename Model::line> axis;
  std::vector<typename Model::boundary> fixed_boundary;
  std::optional<typename Model::point> fixed_point;
  bool identity = false;
  std::optional<double> trace;           // H2 only
  std::optional<double> min_displacement;  // graph only, over vertices
};

struct classify_options {
  double parabolic_band = 1e-9;
  long orbit_n = 1024;
  /// Largest orbit rate still read as zero growth; parabolic orbits grow like 2 log n.
  double zero_rate = 0.05;
};

namespace detail {

/// d(i, g^n i) for large n without overflow: powers kept as (matrix, log scale).
inline double log_scaled_displacement(const h2::moebius& g, long n) {
  struct scaled {
    double a, b, c, d, log_s;
  };
  auto mul = [](const scaled& x, const scaled& y) {
    scaled z{x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d,
             x.log_s + y.log_s};
    double f = std::sqrt(z.a * z.a + z.b * z.b + z.c * z.c + z.d * z.d);
    z.a /= f;
    z.b /= f;
    z.c /= f;
    z.d /= f;
    z.log_s += std::log(f);
    return z;
  };
  scaled base{g.a, g.b, g.c, g.d, 0.0}, acc{1, 0, 0, 1, 0.0};
  unsigned long k = static_cast<unsigned long>(n);
  while (k) {
    if (k & 1) acc = mul(acc, base);
    k >>= 1;
    if (k) base = mul(base, base);
  }
  // cosh d = |G|_F^2 / 2 for G in SL2(R)
  double fro2 = acc.a * acc.a + acc.b * acc.b + acc.c * acc.c + acc.d * acc.d;
  double log_x = 2.0 * acc.log_s + std::log(fro2 / 2.0);
  if (log_x > 20.0) return log_x + std::log1p(std::sqrt(1.0 - std::exp(-2.0 * log_x)));
  double x = std::exp(log_x);
  return x <= 1.0 ? 0.0 : std::acosh(x);
}

/// Difference quotient (d(x, g^{2n}x) - d(x, g^n x)) / n; removes the O(1/n) offset of d/n.
inline double orbit_rate(const h2::moebius& g, long n) {
  return (log_scaled_displacement(g, 2 * n) - log_scaled_displacement(g, n)) / static_cast<double>(n);
}

}  // namespace detail

/// Fixed points in the boundary of a non-elliptic Moebius map.
struct h2_fixed_points {
  h2::boundary attracting;
  h2::boundary repelling;
};

inline h2_fixed_points hyperbolic_fixed_points(const h2::moebius& g) {
  const double norm = std::fabs(g.a) + std::fabs(g.b) + std::fabs(g.c) + std::fabs(g.d);
  const double tr = g.a + g.d;
  const double disc = std::sqrt(std::fmax(tr * tr - 4.0, 0.0));
  std::vector<h2::boundary> roots;
  if (std::fabs(g.c) <= 1e-15 * norm) {
    roots.push_back(h2::boundary::at_infinity());
    roots.push_back({g.b / (g.d - g.a), false});
  } else {
    double amd = g.a - g.d;
    double q = amd + (amd >= 0 ? disc : -disc);
    double z1 = q / (2.0 * g.c);
    double z2 = q != 0.0 ? -2.0 * g.b / q : (amd - disc) / (2.0 * g.c);
    roots.push_back({z1, false});
    roots.push_back({z2, false});
  }
  auto attracting = [&](const h2::boundary& u) {
    if (u.infinite) return std::fabs(g.a) > std::fabs(g.d);
    return std::fabs(g.c * u.x + g.d) > 1.0;
  };
  if (attracting(roots[0])) return {roots[0], roots[1]};
  return {roots[1], roots[0]};
}

inline h2::boundary parabolic_fixed_point(const h2::moebius& g) {
  const double norm = std::fabs(g.a) + std::fabs(g.b) + std::fabs(g.c) + std::fabs(g.d);
  if (std::fabs(g.c) <= 1e-15 * norm) return h2::boundary::at_infinity();
  return {(g.a - g.d) / (2.0 * g.c), false};
}

inline isometry_profile<h2::model> classify(const h2::model& m, const h2::moebius& g,
                                            const classify_options& opt = {}) {
  isometry_profile<h2::model> p;
  const double t = std::fabs(g.trace());
  p.trace = t;
  p.orbit_rate = detail::orbit_rate(g, opt.orbit_n);
  if (m.is_identity(g, opt.parabolic_band)) {
    p.kind = isometry_kind::elliptic;
    p.identity = true;
    p.fixed_point = m.base_point();
    return p;
  }
  if (std::fabs(t - 2.0) <= opt.parabolic_band) {
    if (p.orbit_rate > opt.zero_rate)
      throw ambiguity_error("trace is within the parabolic band but the orbit grows linearly", t, p.orbit_rate);
    p.kind = isometry_kind::parabolic;
    p.fixed_boundary = {parabolic_fixed_point(g)};
    return p;
  }
  if (t < 2.0) {
    p.kind = isometry_kind::elliptic;
    // orbit points spread around the rotation circle, so their centre is the fixed point
    const double phi = std::acos(t / 2.0);
    std::vector<h2::point> orbit;
    for (int k = 0; k < 6; ++k) {
      long j = std::lround(k * std::acos(-1.0) / (3.0 * phi));
      orbit.push_back(h2::apply(h2::power(g, j), m.base_point()));
    }
    p.fixed_point = circumcenter(m, orbit).center;
    return p;
  }
  p.kind = isometry_kind::hyperbolic;
  p.ell = 2.0 * std::acosh(t / 2.0);
  p.asymptotic = p.orbit_rate;
  auto fp = hyperbolic_fixed_points(g);
  p.fixed_boundary = {fp.repelling, fp.attracting};
  p.axis = h2::line::from_endpoints(fp.repelling, fp.attracting);
  return p;
}

inline isometry_profile<ftree::free_tree> classify(const ftree::free_tree& t, const word& g,
                                                   const classify_options& opt = {}) {
  t.validate(g);
  isometry_profile<ftree::free_tree> p;
  if (g.empty()) {
    p.kind = isometry_kind::elliptic;
    p.identity = true;
    p.fixed_point = word{};
    return p;
  }
  auto split = words::cyclic_reduce(g);
  long n = opt.orbit_n;
  double dn = t.distance(word{}, words::power(g, n));
  double d2n = t.distance(word{}, words::power(g, 2 * n));
  p.orbit_rate = (d2n - dn) / static_cast<double>(n);
  p.kind = isometry_kind::hyperbolic;
  p.ell = static_cast<double>(split.core.size());
  p.asymptotic = p.orbit_rate;
  ftree::axis_line ax{split.conj, split.core};
  p.fixed_boundary = {ax.minus(), ax.plus()};
  p.axis = ax;
  return p;
}

/// Graph automorphisms are elliptic; ell is recorded as 0, the vertex minimum separately.
inline isometry_profile<graph::metric_graph> classify(const graph::metric_graph& gr, const std::vector<int>& g,
                                                      const classify_options& = {}) {
  gr.validate(g);
  isometry_profile<graph::metric_graph> p;
  p.kind = isometry_kind::elliptic;
  p.identity = gr.is_identity(g);
  double md = std::numeric_limits<double>::infinity();
  for (int v = 0; v < gr.size(); ++v) md = std::min(md, gr.distance(v, gr.apply(g, v)));
  p.min_displacement = md;
  std::vector<int> orbit{0};
  for (int v = gr.apply(g, 0); v != 0; v = gr.apply(g, v)) orbit.push_back(v);
  p.fixed_point = circumcenter(gr, orbit).center;
  return p;
}

template <class Model>
typename Model::line axis(const Model& m, const typename Model::isometry& g) {
  auto p = classify(m, g);
  if (p.kind != isometry_kind::hyperbolic || !p.axis) throw domain_error("axis requested for a non-hyperbolic isometry");
  return *p.axis;
}

struct power_displacement {
  double measured = 0.0;
  double bound = 0.0;
};

template <class Model>
power_displacement power_displacement_check(const Model& m, const typename Model::isometry& g,
                                            const typename Model::point& x, long n, double delta) {
  if (n < 1) throw input_error("power must be at least 1");
  auto prof = classify(m, g);
  power_displacement out;
  out.measured = static_cast<double>(m.distance(x, m.apply(m.power(g, n), x)));
  out.bound = static_cast<double>(m.distance(x, m.apply(g, x))) + static_cast<double>(n - 1) * prof.ell +
              4.0 * delta * std::log2(static_cast<double>(n));
  return out;
}

}  // namespace hypcert
