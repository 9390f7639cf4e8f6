#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "hypcert/error.hpp"
#include "hypcert/metric/sampled_space.hpp"
#include "hypcert/word.hpp"

namespace hypcert::ftree {

/**
 * @brief Boundary point of the Cayley tree: the infinite reduced word
 * prefix * period * period * ...
 *
 * Kept canonical: the prefix is as short as possible and the period is
 * primitive, so equality of rays is equality of the two fields.
 */
struct ray {
  word prefix;
  word period;

  static ray make(word prefix, word period) {
    if (period.empty()) throw input_error("ray period must be nonempty");
    prefix = words::reduce(prefix);
    auto split = words::cyclic_reduce(words::reduce(period));
    if (!split.conj.empty() || split.core.empty())
      throw input_error("ray period must be cyclically reduced");
    period = std::move(split.core);
    if (!prefix.empty() && prefix.back() == -period.front())
      throw input_error("ray is not a reduced infinite word");
    // pull the period back into the prefix while they agree
    while (!prefix.empty() && prefix.back() == period.back()) {
      std::rotate(period.rbegin(), period.rbegin() + 1, period.rend());
      prefix.pop_back();
    }
    // primitive root
    const std::size_t n = period.size();
    for (std::size_t p = 1; p <= n; ++p) {
      if (n % p) continue;
      bool ok = true;
      for (std::size_t i = p; i < n && ok; ++i) ok = period[i] == period[i - p];
      if (ok) {
        period.resize(p);
        break;
      }
    }
    return {std::move(prefix), std::move(period)};
  }

  /// First m letters of the infinite word.
  word truncate(std::size_t m) const {
    word out(prefix.begin(), prefix.begin() + static_cast<std::ptrdiff_t>(std::min(m, prefix.size())));
    std::size_t k = 0;
    while (out.size() < m) out.push_back(period[k++ % period.size()]);
    return out;
  }

  bool operator==(const ray& o) const { return prefix == o.prefix && period == o.period; }
};

/// Left translate of a ray: g * xi.
inline ray translate(const word& g, const ray& xi) {
  // cancellation is bounded by |g|, so a long enough truncation decides it
  std::size_t m = xi.prefix.size() + (g.size() + 2) * xi.period.size() + g.size() + 2;
  word t = words::multiply(g, xi.truncate(m));
  std::size_t keep = t.size() - std::min(t.size(), (g.size() + 1) * xi.period.size());
  word pre(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(keep));
  word per(t.begin() + static_cast<std::ptrdiff_t>(keep),
           t.begin() + static_cast<std::ptrdiff_t>(keep + xi.period.size()));
  return ray::make(pre, per);
}

inline std::string format(const ray& xi, int rank = 26) {
  std::string pre = xi.prefix.empty() ? "" : words::format(xi.prefix, rank);
  return pre + "(" + words::format(xi.period, rank) + ")^inf";
}

/** @brief Axis of a hyperbolic element conj * core * conj^-1. */
struct axis_line {
  word conj;
  word core;

  long length_period() const { return static_cast<long>(core.size()); }

  word point_at(long t) const {
    const long n = length_period();
    long q = t >= 0 ? t / n : -((-t + n - 1) / n);
    long r = t - q * n;
    word w = conj;
    w = words::multiply(w, words::power(core, q));
    w = words::multiply(w, word(core.begin(), core.begin() + r));
    return w;
  }

  ray plus() const { return ray::make(conj, core); }
  ray minus() const { return ray::make(conj, words::inverse(core)); }
};

/** @brief Reduced-word Cayley tree of the free group of the given rank. */
struct free_tree {
  using point = word;
  using isometry = word;
  using boundary = ray;
  using line = axis_line;
  using real = double;

  static constexpr const char* name = "free_tree";

  int rank = 2;

  void validate(const word& w) const {
    for (int x : w)
      if (x == 0 || std::abs(x) > rank) throw input_error("letter outside the free basis");
    if (!words::is_reduced(w)) throw input_error("word is not freely reduced");
  }

  /// |reduced(u^-1 v)| via the common prefix.
  long distance_exact(const word& u, const word& v) const {
    validate(u);
    validate(v);
    std::size_t c = 0;
    while (c < u.size() && c < v.size() && u[c] == v[c]) ++c;
    return static_cast<long>(u.size() + v.size() - 2 * c);
  }
  double distance(const word& u, const word& v) const { return static_cast<double>(distance_exact(u, v)); }

  point apply(const isometry& g, const point& p) const { return words::multiply(g, p); }
  ray apply(const isometry& g, const ray& xi) const { return translate(g, xi); }
  isometry compose(const isometry& g, const isometry& h) const { return words::multiply(g, h); }
  isometry inverse(const isometry& g) const { return words::inverse(g); }
  isometry identity() const { return {}; }
  isometry power(const isometry& g, long n) const { return words::power(g, n); }
  bool is_identity(const isometry& g, double = 0) const { return g.empty(); }
  bool same(const isometry& g, const isometry& h, double = 0) const { return g == h; }

  /// Vertex path from p to q.
  std::vector<word> path(const word& p, const word& q) const {
    word step = words::multiply(words::inverse(p), q);
    std::vector<word> out{p};
    word cur = p;
    for (int x : step) {
      cur = words::multiply(cur, word{x});
      out.push_back(cur);
    }
    return out;
  }

  /// Vertex at distance round(s) from p along [p, q].
  point geodesic_point(const word& p, const word& q, double s) const {
    auto pth = path(p, q);
    long k = std::clamp(static_cast<long>(std::lround(s)), 0L, static_cast<long>(pth.size()) - 1);
    return pth[static_cast<std::size_t>(k)];
  }

  point base_point() const { return {}; }

  /// All reduced words of length <= R in shortlex order.
  std::vector<word> ball(const word& center, long R, std::size_t limit = 5'000'000) const {
    std::vector<word> out{word{}};
    std::size_t frontier_start = 0;
    for (long len = 1; len <= R; ++len) {
      std::size_t frontier_end = out.size();
      for (std::size_t i = frontier_start; i < frontier_end; ++i) {
        for (int key = 0; key < 2 * rank; ++key) {
          int x = words::letter_from_key(key);
          const word& w = out[i];
          if (!w.empty() && w.back() == -x) continue;
          word nw = w;
          nw.push_back(x);
          out.push_back(std::move(nw));
          if (out.size() > limit) throw budget_error("tree ball exceeds enumeration limit", static_cast<std::size_t>(len));
        }
      }
      frontier_start = frontier_end;
    }
    if (!center.empty())
      for (auto& w : out) w = words::multiply(center, w);
    return out;
  }
};

/// Closed ball size in the free group of rank k: 1 + 2k((2k-1)^R - 1)/(2k-2).
inline long ball_census(int k, long R) {
  long total = 1, sphere = 2L * k;
  for (long n = 1; n <= R; ++n) {
    total += sphere;
    sphere *= 2L * k - 1;
  }
  return total;
}

/// Parameter of the projection of vertex x onto the axis (smallest minimiser).
inline long project_param(const free_tree& t, const axis_line& ax, const word& x) {
  long window = 2 * static_cast<long>(x.size() + ax.conj.size() + ax.core.size()) + 2;
  long best_t = 0, best_d = -1;
  for (long s = -window; s <= window; ++s) {
    long d = t.distance_exact(x, ax.point_at(s));
    if (best_d < 0 || d < best_d) {
      best_d = d;
      best_t = s;
    }
  }
  return best_t;
}

inline word project(const free_tree& t, const axis_line& ax, const word& x) {
  return ax.point_at(project_param(t, ax, x));
}

/// Projection onto a finite vertex set (a subtree), the nearest vertex.
inline word project(const free_tree& t, const std::vector<word>& target, const word& x) {
  if (target.empty()) throw input_error("empty projection target");
  const word* best = &target.front();
  long bd = t.distance_exact(x, *best);
  for (const auto& c : target) {
    long d = t.distance_exact(x, c);
    if (d < bd) {
      bd = d;
      best = &c;
    }
  }
  return *best;
}

/// Boundary projection onto an axis: projections of deep truncations stabilise.
inline long boundary_projection_param(const free_tree& t, const axis_line& ax, const ray& xi) {
  if (xi == ax.plus() || xi == ax.minus())
    throw domain_error("boundary point is an endpoint of the target axis");
  std::size_t m = xi.prefix.size() + (ax.conj.size() + ax.core.size() + 2) * xi.period.size() + 2;
  long last = project_param(t, ax, xi.truncate(m));
  for (int round = 0; round < 64; ++round) {
    m += xi.period.size();
    long next = project_param(t, ax, xi.truncate(m));
    if (next == last) return next;
    last = next;
  }
  throw domain_error("boundary projection does not stabilise");
}

inline word project(const free_tree& t, const axis_line& ax, const ray& xi) {
  return ax.point_at(boundary_projection_param(t, ax, xi));
}

inline sampled_space to_sampled(const free_tree& t, const std::vector<word>& pts,
                                std::optional<std::string> provenance = std::nullopt) {
  std::vector<std::string> ids;
  for (const auto& w : pts) ids.push_back(words::format(w, t.rank));
  return sampled_space::from_points(pts, ids, [&](const word& u, const word& v) { return t.distance(u, v); },
                                    std::move(provenance));
}

/// Full ball if it has at most n points, else its first n points in shortlex order.
inline sampled_space sample_ball(const free_tree& t, const word& center, double R, std::size_t n) {
  long r = static_cast<long>(std::floor(R + 1e-9));
  auto pts = t.ball(center, std::max(0L, r));
  if (pts.size() > n) pts.resize(n);
  return to_sampled(t, pts,
                    "free_tree rank=" + std::to_string(t.rank) + " ball center=" + words::format(center, t.rank) +
                        " R=" + std::to_string(r));
}

}  // namespace hypcert::ftree
