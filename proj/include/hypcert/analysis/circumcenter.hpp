#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "hypcert/error.hpp"
#include "hypcert/model/free_tree.hpp"
#include "hypcert/model/h2.hpp"
#include "hypcert/model/metric_graph.hpp"

namespace hypcert {

template <class Point>
struct circumcenter_result {
  Point center;
  double radius = 0.0;
  /// Tree only: the true centre is the midpoint of [center, edge_partner].
  std::optional<Point> edge_partner;
};

namespace detail {

// Golden-section minimiser of a unimodal function on [lo, hi].
template <class F>
double golden_min(F&& f, double lo, double hi, double width = 1e-12, int max_iter = 200) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  if (hi - lo <= width) return 0.5 * (lo + hi);
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < max_iter && hi - lo > width; ++it) {
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

/**
 * @brief Centre of a finite set in H^2.
 *
 * The max-distance function is minimised in Fermi coordinates (s, h) of the
 * geodesic through an approximate diameter: golden section in h along each
 * perpendicular, nested inside golden section in s. Both searches are over
 * unimodal functions because sublevel sets are convex.
 */
inline circumcenter_result<h2::point> circumcenter(const h2::model&, const std::vector<h2::point>& pts) {
  if (pts.empty()) throw input_error("circumcenter of an empty set");
  auto farthest = [&](const h2::point& p) {
    std::size_t best = 0;
    double bd = -1;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      double d = h2::distance(p, pts[k]);
      if (d > bd) {
        bd = d;
        best = k;
      }
    }
    return std::make_pair(best, bd);
  };
  auto [i1, d01] = farthest(pts.front());
  auto [i2, d12] = farthest(pts[i1]);
  if (d12 <= 0.0) return {pts.front(), 0.0, std::nullopt};
  const h2::line frame = h2::segment(pts[i1], pts[i2]).line;
  std::vector<h2::point> w;
  double s_lo = 1e300, s_hi = -1e300, h_lo = 0, h_hi = 0;
  for (const auto& p : pts) {
    auto q = frame.to_frame(p);
    w.push_back(q);
    double s = std::log(std::hypot(q.x, q.y));
    double h = std::asinh(q.x / q.y);
    s_lo = std::min(s_lo, s);
    s_hi = std::max(s_hi, s);
    h_lo = std::min(h_lo, h);
    h_hi = std::max(h_hi, h);
  }
  auto at = [](double s, double h) {
    double e = std::exp(s);
    return h2::point{e * std::tanh(h), e / std::cosh(h)};
  };
  auto f = [&](double s, double h) {
    h2::point z = at(s, h);
    double m = 0;
    for (const auto& q : w) m = std::max(m, h2::distance(z, q));
    return m;
  };
  auto best_h = [&](double s) { return detail::golden_min([&](double h) { return f(s, h); }, h_lo, h_hi); };
  double s = detail::golden_min([&](double s) { return f(s, best_h(s)); }, s_lo, s_hi);
  double h = best_h(s);
  h2::point c = h2::apply(frame.frame, at(s, h));
  double radius = 0;
  for (const auto& p : pts) radius = std::max(radius, h2::distance(c, p));
  return {c, radius, std::nullopt};
}

/// Tree centre: midpoint of a diameter, found by a double sweep.
inline circumcenter_result<word> circumcenter(const ftree::free_tree& t, const std::vector<word>& pts) {
  if (pts.empty()) throw input_error("circumcenter of an empty set");
  auto farthest = [&](const word& p) {
    const word* best = &pts.front();
    long bd = -1;
    for (const auto& q : pts) {
      long d = t.distance_exact(p, q);
      if (d > bd) {
        bd = d;
        best = &q;
      }
    }
    return std::make_pair(*best, bd);
  };
  auto [p1, d01] = farthest(pts.front());
  auto [p2, diam] = farthest(p1);
  auto path = t.path(p1, p2);
  circumcenter_result<word> out{path[static_cast<std::size_t>(diam / 2)], 0.5 * static_cast<double>(diam), std::nullopt};
  if (diam % 2) out.edge_partner = path[static_cast<std::size_t>(diam / 2 + 1)];
  return out;
}

/// Graph centre restricted to vertices (smallest index among ties).
inline circumcenter_result<int> circumcenter(const graph::metric_graph& g, const std::vector<int>& pts) {
  if (pts.empty()) throw input_error("circumcenter of an empty set");
  int best = 0;
  double br = std::numeric_limits<double>::infinity();
  for (int v = 0; v < g.size(); ++v) {
    double r = 0;
    for (int p : pts) r = std::max(r, g.distance(v, p));
    if (r < br) {
      br = r;
      best = v;
    }
  }
  return {best, br, std::nullopt};
}

}  // namespace hypcert
