#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "hypcert/analysis/classify.hpp"
#include "hypcert/error.hpp"
#include "hypcert/model/h2.hpp"
#include "hypcert/pingpong/oracle.hpp"

namespace hypcert {

/**
 * @brief Pairs (a, b(t)) with b(t) = P(D) a^-1 P(D)^-1, P(D) the translation
 * by D along the real axis, and D(t) = D* + (D0 - D*)(1 - t)^3.
 *
 * trace(a b) = cosh D + 1 - (cosh D - 1) cosh ell(a), so a b(1) is parabolic
 * when cosh D* = (cosh ell + 3) / (cosh ell - 1).
 */
struct degeneration_family {
  h2::moebius a;
  double D_star = 0;
  double D0 = 0;

  double D(double t) const { return D_star + (D0 - D_star) * std::pow(1 - t, 3); }

  h2::moebius b(double t) const {
    const double d = D(t);
    auto P = h2::matrix(std::cosh(d / 2), std::sinh(d / 2), std::sinh(d / 2), std::cosh(d / 2));
    return P * h2::inverse(a) * h2::inverse(P);
  }
};

inline degeneration_family make_degeneration(const h2::moebius& a, double offset = 2.0) {
  h2::model m;
  auto pa = classify(m, a);
  if (pa.kind != isometry_kind::hyperbolic) throw input_error("family needs a hyperbolic a");
  if (!(offset >= 0)) throw input_error("D offset must be nonnegative");
  const double ch = std::cosh(pa.ell);
  degeneration_family f;
  f.a = a;
  f.D_star = std::acosh((ch + 3) / (ch - 1));
  f.D0 = f.D_star + offset;
  return f;
}

struct degeneration_step {
  double t = 0;
  double ell = 0;
  double trace = 0;
  isometry_kind kind = isometry_kind::hyperbolic;
  double sys = 0;  // least displacement of i over nonidentity words up to word_cap
};

inline std::vector<degeneration_step> degeneration_path(const degeneration_family& f, int steps, int word_cap) {
  if (steps < 1) throw input_error("steps must be at least 1");
  h2::model m;
  std::vector<degeneration_step> out;
  for (int k = 0; k < steps; ++k) {
    degeneration_step s;
    s.t = steps == 1 ? 0.0 : static_cast<double>(k) / (steps - 1);
    auto b = f.b(s.t);
    auto prof = classify(m, f.a * b);
    s.ell = prof.ell;
    s.trace = *prof.trace;
    s.kind = prof.kind;
    s.sys = std::numeric_limits<double>::infinity();
    for_each_reduced_word(2, word_cap, [&](const word& w) {
      auto g = evaluate(m, {f.a, b}, w);
      if (!m.is_identity(g)) s.sys = std::min(s.sys, m.distance(m.base_point(), m.apply(g, m.base_point())));
      return true;
    });
    out.push_back(s);
  }
  return out;
}

}  // namespace hypcert
