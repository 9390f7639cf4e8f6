#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hypcert/error.hpp"
#include "hypcert/metric/sampled_space.hpp"
#include "hypcert/rng.hpp"

namespace hypcert::h2 {

namespace detail {
// Inverse hyperbolic functions spelled out so that non-builtin scalars work.
template <class Real>
Real asinh_(const Real& x) {
  using std::log;
  using std::sqrt;
  using std::fabs;
  Real ax = fabs(x);
  Real v = ax < Real(1e-8) ? ax : log(ax + sqrt(ax * ax + Real(1)));
  return x < Real(0) ? Real(-v) : v;
}
inline double asinh_(const double& x) { return std::asinh(x); }

template <class Real>
Real acosh_(const Real& x) {
  using std::log;
  using std::sqrt;
  return log(x + sqrt((x - Real(1)) * (x + Real(1))));
}
inline double acosh_(const double& x) { return std::acosh(x); }
}  // namespace detail

/** @brief Point x + iy of the upper half-plane. */
template <class Real>
struct basic_point {
  Real x{0};
  Real y{1};
};

/** @brief Extended real boundary point. */
template <class Real>
struct basic_boundary {
  Real x{0};
  bool infinite = false;
  static basic_boundary at_infinity() { return {Real(0), true}; }
};

/** @brief Orientation-preserving isometry z -> (az+b)/(cz+d), ad - bc = 1. */
template <class Real>
struct basic_moebius {
  Real a{1}, b{0}, c{0}, d{1};

  Real trace() const { return a + d; }

  /// Rescale to unit determinant and fix the sign convention.
  static basic_moebius normalized(Real a, Real b, Real c, Real d) {
    using std::sqrt;
    Real det = a * d - b * c;
    if (!(det > Real(0)))
      throw input_error("matrix determinant must be positive for an orientation-preserving isometry");
    Real s = sqrt(det);
    basic_moebius m{a / s, b / s, c / s, d / s};
    return m.sign_fixed();
  }

  /// Choose the representative of +-M with trace >= 0, ties by first nonzero entry.
  basic_moebius sign_fixed() const {
    Real t = a + d;
    bool flip = false;
    if (t < Real(0))
      flip = true;
    else if (t == Real(0)) {
      for (const Real* e : {&a, &b, &c, &d}) {
        if (*e != Real(0)) {
          flip = *e < Real(0);
          break;
        }
      }
    }
    if (!flip) return *this;
    return {-a, -b, -c, -d};
  }
};

template <class Real>
basic_moebius<Real> operator*(const basic_moebius<Real>& g, const basic_moebius<Real>& h) {
  basic_moebius<Real> m{g.a * h.a + g.b * h.c, g.a * h.b + g.b * h.d, g.c * h.a + g.d * h.c,
                        g.c * h.b + g.d * h.d};
  return m.sign_fixed();
}

template <class Real>
basic_moebius<Real> inverse(const basic_moebius<Real>& g) {
  return basic_moebius<Real>{g.d, -g.b, -g.c, g.a}.sign_fixed();
}

template <class Real>
basic_moebius<Real> power(const basic_moebius<Real>& g, long n) {
  basic_moebius<Real> base = n < 0 ? inverse(g) : g;
  unsigned long k = n < 0 ? static_cast<unsigned long>(-n) : static_cast<unsigned long>(n);
  basic_moebius<Real> out{};
  while (k) {
    if (k & 1) out = out * base;
    k >>= 1;
    if (k) base = base * base;
  }
  return out;
}

template <class Real>
basic_point<Real> apply(const basic_moebius<Real>& g, const basic_point<Real>& z) {
  Real ux = g.c * z.x + g.d, uy = g.c * z.y;
  Real den = ux * ux + uy * uy;
  Real nx = g.a * z.x + g.b;
  Real re = (nx * ux + g.a * z.y * uy) / den;
  Real im = z.y / den;
  return {re, im};
}

template <class Real>
basic_boundary<Real> apply(const basic_moebius<Real>& g, const basic_boundary<Real>& u) {
  if (u.infinite) {
    if (g.c == Real(0)) return basic_boundary<Real>::at_infinity();
    return {g.a / g.c, false};
  }
  Real den = g.c * u.x + g.d;
  if (den == Real(0)) return basic_boundary<Real>::at_infinity();
  return {(g.a * u.x + g.b) / den, false};
}

template <class Real>
Real distance(const basic_point<Real>& p, const basic_point<Real>& q) {
  using std::sqrt;
  Real dx = p.x - q.x, dy = p.y - q.y;
  Real chord = sqrt(dx * dx + dy * dy);
  return Real(2) * detail::asinh_(chord / (Real(2) * sqrt(p.y * q.y)));
}

/// Angle of a boundary point on the circle picture, infinity at pi.
template <class Real>
Real boundary_angle(const basic_boundary<Real>& u) {
  using std::atan;
  const Real pi = Real(4) * atan(Real(1));
  if (u.infinite) return pi;
  return Real(2) * atan(u.x);
}

template <class Real>
bool same_boundary(const basic_boundary<Real>& u, const basic_boundary<Real>& v, double tol = 1e-9) {
  using std::fabs;
  using std::atan;
  const Real pi = Real(4) * atan(Real(1));
  Real diff = fabs(boundary_angle(u) - boundary_angle(v));
  if (diff > pi) diff = Real(2) * pi - diff;
  return diff <= Real(tol);
}

/**
 * @brief Oriented geodesic line, stored as the frame M taking the imaginary
 * axis to it: gamma(t) = M(e^t i), gamma(-inf) = M(0), gamma(+inf) = M(inf).
 */
template <class Real>
struct basic_line {
  basic_moebius<Real> frame{};

  basic_point<Real> point_at(const Real& t) const {
    using std::exp;
    return apply(frame, basic_point<Real>{Real(0), exp(t)});
  }
  basic_boundary<Real> start() const { return apply(frame, basic_boundary<Real>{Real(0), false}); }
  basic_boundary<Real> end() const { return apply(frame, basic_boundary<Real>::at_infinity()); }

  /// Frame coordinates of z: M^-1 z.
  basic_point<Real> to_frame(const basic_point<Real>& z) const { return apply(inverse(frame), z); }

  /// Parameter of the foot of the perpendicular from z.
  Real foot_param(const basic_point<Real>& z) const {
    using std::log;
    using std::sqrt;
    auto w = to_frame(z);
    return log(sqrt(w.x * w.x + w.y * w.y));
  }

  Real distance_to(const basic_point<Real>& z) const {
    using std::fabs;
    auto w = to_frame(z);
    return detail::asinh_(fabs(w.x) / w.y);
  }

  basic_line reversed() const {
    // compose with z -> -1/z, which swaps 0 and infinity
    basic_moebius<Real> flip{Real(0), Real(-1), Real(1), Real(0)};
    return {(frame * flip)};
  }

  static basic_line from_endpoints(const basic_boundary<Real>& minus, const basic_boundary<Real>& plus) {
    if (same_boundary(minus, plus, 0.0) || (minus.infinite && plus.infinite))
      throw input_error("geodesic endpoints coincide");
    if (plus.infinite) return {basic_moebius<Real>{Real(1), minus.x, Real(0), Real(1)}};
    if (minus.infinite) return {basic_moebius<Real>{plus.x, Real(-1), Real(1), Real(0)}};
    if (plus.x > minus.x)
      return {basic_moebius<Real>::normalized(plus.x, minus.x, Real(1), Real(1))};
    return {basic_moebius<Real>::normalized(plus.x, -minus.x, Real(1), Real(-1))};
  }
};

/** @brief Geodesic segment gamma([t0, t1]) of an oriented line. */
template <class Real>
struct basic_segment {
  basic_line<Real> line{};
  Real t0{0}, t1{0};

  Real length() const { return t1 - t0; }
  basic_point<Real> at_arclength(const Real& s) const { return line.point_at(t0 + s); }
  basic_point<Real> start() const { return line.point_at(t0); }
  basic_point<Real> finish() const { return line.point_at(t1); }

  /// n equally spaced points including both ends.
  std::vector<basic_point<Real>> sample(std::size_t n) const {
    std::vector<basic_point<Real>> out;
    if (n == 1) {
      out.push_back(start());
      return out;
    }
    for (std::size_t k = 0; k < n; ++k)
      out.push_back(line.point_at(t0 + (t1 - t0) * Real(static_cast<double>(k)) / Real(static_cast<double>(n - 1))));
    return out;
  }
};

template <class Real>
basic_segment<Real> segment(const basic_point<Real>& p, const basic_point<Real>& q) {
  using std::fabs;
  using std::sqrt;
  Real scale = fabs(p.x) + fabs(q.x) + p.y + q.y;
  Real dx = p.x - q.x;
  basic_line<Real> line;
  if (dx == Real(0) || fabs(dx) <= Real(1e-15) * scale) {
    Real x0 = p.x;
    line = basic_line<Real>::from_endpoints({x0, false}, basic_boundary<Real>::at_infinity());
  } else {
    Real c = ((p.x * p.x + p.y * p.y) - (q.x * q.x + q.y * q.y)) / (Real(2) * dx);
    Real rho = sqrt((p.x - c) * (p.x - c) + p.y * p.y);
    line = basic_line<Real>::from_endpoints({c - rho, false}, {c + rho, false});
  }
  Real tp = line.foot_param(p), tq = line.foot_param(q);
  if (tq < tp) {
    line = line.reversed();
    tp = -tp;
    tq = -tq;
  }
  return {line, tp, tq};
}

/// Point at distance s from p along [p, q].
template <class Real>
basic_point<Real> geodesic_point(const basic_point<Real>& p, const basic_point<Real>& q, const Real& s) {
  if (p.x == q.x && p.y == q.y) return p;
  return segment(p, q).at_arclength(s);
}

/** @brief Model object for H^2 over the scalar type Real. */
template <class Real = double>
struct basic_model {
  using real = Real;
  using point = basic_point<Real>;
  using boundary = basic_boundary<Real>;
  using isometry = basic_moebius<Real>;
  using line = basic_line<Real>;

  static constexpr const char* name = "h2";

  Real distance(const point& p, const point& q) const {
    if (!(p.y > Real(0)) || !(q.y > Real(0))) throw input_error("H2 point must have y > 0");
    return h2::distance(p, q);
  }
  point apply(const isometry& g, const point& p) const { return h2::apply(g, p); }
  boundary apply(const isometry& g, const boundary& u) const { return h2::apply(g, u); }
  isometry compose(const isometry& g, const isometry& h) const { return g * h; }
  isometry inverse(const isometry& g) const { return h2::inverse(g); }
  isometry identity() const { return {}; }
  isometry power(const isometry& g, long n) const { return h2::power(g, n); }

  /// Max-entry distance to +-I within tol.
  bool is_identity(const isometry& g, double tol = default_tolerance) const {
    using std::fabs;
    auto close = [&](Real s) {
      return fabs(g.a - s) <= Real(tol) && fabs(g.b) <= Real(tol) && fabs(g.c) <= Real(tol) &&
             fabs(g.d - s) <= Real(tol);
    };
    return close(Real(1)) || close(Real(-1));
  }
  bool same(const isometry& g, const isometry& h, double tol = default_tolerance) const {
    using std::fabs;
    using std::fmax;
    auto close = [&](Real s) {
      Real scale = fmax(Real(1), fmax(fmax(fabs(g.a), fabs(g.b)), fmax(fabs(g.c), fabs(g.d))));
      Real t = Real(tol) * scale;
      return fabs(g.a - s * h.a) <= t && fabs(g.b - s * h.b) <= t && fabs(g.c - s * h.c) <= t &&
             fabs(g.d - s * h.d) <= t;
    };
    return close(Real(1)) || close(Real(-1));
  }
  point geodesic_point(const point& p, const point& q, const Real& s) const { return h2::geodesic_point(p, q, s); }
  point base_point() const { return {Real(0), Real(1)}; }
};

using point = basic_point<double>;
using boundary = basic_boundary<double>;
using moebius = basic_moebius<double>;
using line = basic_line<double>;
using segment_t = basic_segment<double>;
using model = basic_model<double>;

inline moebius matrix(double a, double b, double c, double d) { return moebius::normalized(a, b, c, d); }

/// Rotation about i by angle 2*phi: [[cos phi, sin phi], [-sin phi, cos phi]].
inline moebius rotation(double phi) {
  return moebius{std::cos(phi), std::sin(phi), -std::sin(phi), std::cos(phi)}.sign_fixed();
}

/// Translation by length s along the imaginary axis.
inline moebius axis_translation(double s) { return moebius{std::exp(s / 2), 0.0, 0.0, std::exp(-s / 2)}; }

/// Isometry taking i to z: z -> y z + x, as a unit-determinant matrix.
inline moebius lift_to(const point& z) {
  double s = std::sqrt(z.y);
  return moebius{s, z.x / s, 0.0, 1.0 / s};
}

/// Projection of z onto a line (foot of the perpendicular).
inline point project(const line& l, const point& z) { return l.point_at(l.foot_param(z)); }

/// Projection onto a segment: clamp the foot parameter.
inline point project(const segment_t& s, const point& z) {
  double t = std::clamp(s.line.foot_param(z), s.t0, s.t1);
  return s.line.point_at(t);
}

/// Parameter of the boundary projection of u onto l; u must not be an endpoint.
inline double boundary_projection_param(const line& l, const boundary& u, double tol = default_tolerance) {
  if (same_boundary(u, l.start(), tol) || same_boundary(u, l.end(), tol))
    throw domain_error("boundary point is an endpoint of the target geodesic");
  auto w = apply(inverse(l.frame), u);
  if (w.infinite || w.x == 0.0) throw domain_error("boundary point is an endpoint of the target geodesic");
  return std::log(std::fabs(w.x));
}

inline point project(const line& l, const boundary& u, double tol = default_tolerance) {
  return l.point_at(boundary_projection_param(l, u, tol));
}

/// Uniform-in-area sample of the closed ball B(center, R), exact radial inverse CDF.
inline std::vector<point> sample_ball_points(const point& center, double R, std::size_t n, std::uint64_t seed) {
  if (!(R >= 0) || n < 1) throw input_error("ball sampling needs R >= 0 and n >= 1");
  rng gen(seed);
  std::vector<point> out;
  out.reserve(n);
  const moebius to_center = lift_to(center);
  const double span = std::cosh(R) - 1.0;
  const double pi = std::acos(-1.0);
  for (std::size_t k = 0; k < n; ++k) {
    double u = gen.uniform();
    double theta = gen.uniform(0.0, 2 * pi);
    double rho = std::acosh(1.0 + u * span);
    rho = std::min(rho, R);
    point p = apply(rotation(theta / 2), point{0.0, std::exp(rho)});
    out.push_back(apply(to_center, p));
  }
  return out;
}

inline std::string point_id(const point& p) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g%+.12gi", p.x, p.y);
  return buf;
}

inline sampled_space to_sampled(const std::vector<point>& pts, std::optional<std::string> provenance = std::nullopt) {
  std::vector<std::string> ids;
  for (std::size_t k = 0; k < pts.size(); ++k) ids.push_back("p" + std::to_string(k));
  return sampled_space::from_points(pts, ids, [](const point& p, const point& q) { return distance(p, q); },
                                    std::move(provenance));
}

inline sampled_space sample_ball(const point& center, double R, std::size_t n, std::uint64_t seed) {
  if (R <= 1e-15) return to_sampled({center}, "h2 ball R=0");
  return to_sampled(sample_ball_points(center, R, n, seed),
                    "h2 ball center=" + point_id(center) + " R=" + std::to_string(R) + " seed=" + std::to_string(seed));
}

}  // namespace hypcert::h2
