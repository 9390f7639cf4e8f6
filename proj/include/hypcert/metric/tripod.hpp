#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "hypcert/error.hpp"
#include "hypcert/metric/gromov.hpp"
#include "hypcert/metric/sampled_space.hpp"

namespace hypcert {

template <class Point>
struct tripod {
  Point c_x;  // on [y, z]
  Point c_y;  // on [x, z]
  Point c_z;  // on [x, y]
  double thinness = 0.0;
};

/// Internal points of the triangle xyz in a geodesic model.
template <class Model, class Point = typename Model::point>
tripod<Point> tripod_points(const Model& m, const Point& x, const Point& y, const Point& z) {
  double gx = gromov_product(m, y, z, x);
  double gy = gromov_product(m, x, z, y);
  tripod<Point> t{m.geodesic_point(y, z, gy), m.geodesic_point(x, z, gx), m.geodesic_point(x, y, gx), 0.0};
  t.thinness = std::max({static_cast<double>(m.distance(t.c_x, t.c_y)), static_cast<double>(m.distance(t.c_x, t.c_z)),
                         static_cast<double>(m.distance(t.c_y, t.c_z))});
  return t;
}

namespace detail {
// Sample point best matching the position at arclength s from p on a chain p -> q.
inline std::size_t chain_point(const sampled_space& s, std::size_t p, std::size_t q, double at) {
  std::size_t best = p;
  double score = std::numeric_limits<double>::infinity();
  const double rest = s.d(p, q) - at;
  for (std::size_t k = 0; k < s.size(); ++k) {
    double v = std::fabs(s.d(p, k) - at) + std::fabs(s.d(k, q) - rest);
    if (v < score) {
      score = v;
      best = k;
    }
  }
  return best;
}
}  // namespace detail

/// Sampled version: internal points approximated by sample chain points.
inline tripod<std::size_t> tripod_points(const sampled_space& s, std::size_t x, std::size_t y, std::size_t z) {
  double gx = gromov_product(s, y, z, x);
  double gy = gromov_product(s, x, z, y);
  tripod<std::size_t> t{detail::chain_point(s, y, z, gy), detail::chain_point(s, x, z, gx),
                        detail::chain_point(s, x, y, gx), 0.0};
  t.thinness = std::max({s.d(t.c_x, t.c_y), s.d(t.c_x, t.c_z), s.d(t.c_y, t.c_z)});
  return t;
}

/// Nearest point of a finite target set (smallest index among ties).
template <class Model, class Point = typename Model::point>
Point project_to_set(const Model& m, const std::vector<Point>& target, const Point& x) {
  if (target.empty()) throw input_error("empty projection target");
  std::size_t best = 0;
  double bd = static_cast<double>(m.distance(x, target[0]));
  for (std::size_t k = 1; k < target.size(); ++k) {
    double d = static_cast<double>(m.distance(x, target[k]));
    if (d < bd) {
      bd = d;
      best = k;
    }
  }
  return target[best];
}

template <class Model, class Point = typename Model::point>
double distance_to_set(const Model& m, const std::vector<Point>& target, const Point& x) {
  double bd = std::numeric_limits<double>::infinity();
  for (const auto& c : target) bd = std::min(bd, static_cast<double>(m.distance(x, c)));
  return bd;
}

template <class Point>
struct helly_result {
  Point witness;
  double bound = 0.0;
  std::vector<double> distances;  // witness to each set
};

/**
 * @brief Point close to every set of a pairwise-intersecting quasiconvex family.
 *
 * Follows the constructive recipe: nearest points of each set to a base
 * point, then the one farthest from the base.
 */
template <class Model, class Point = typename Model::point>
helly_result<Point> helly_witness(const Model& m, const std::vector<std::vector<Point>>& sets, double delta,
                                  double lambda, double touch = default_tolerance) {
  if (sets.empty()) throw input_error("helly witness needs at least one set");
  if (lambda < 0) throw input_error("quasiconvexity constant must be nonnegative");
  for (const auto& c : sets)
    if (c.empty()) throw precondition_error("empty set in helly family");
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (std::size_t j = i + 1; j < sets.size(); ++j) {
      bool meet = false;
      for (const auto& p : sets[i]) {
        if (distance_to_set(m, sets[j], p) <= touch) {
          meet = true;
          break;
        }
      }
      if (!meet)
        throw precondition_error("sets " + std::to_string(i) + " and " + std::to_string(j) + " are disjoint");
    }
  const Point x0 = sets.front().front();
  Point far = x0;
  double far_d = -1.0;
  for (const auto& c : sets) {
    Point xi = project_to_set(m, c, x0);
    double d = static_cast<double>(m.distance(x0, xi));
    if (d > far_d) {
      far_d = d;
      far = xi;
    }
  }
  helly_result<Point> out{far, 119.0 * delta + 15.0 * lambda, {}};
  for (const auto& c : sets) out.distances.push_back(distance_to_set(m, c, far));
  return out;
}

}  // namespace hypcert
