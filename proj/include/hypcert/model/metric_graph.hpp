#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "hypcert/error.hpp"
#include "hypcert/metric/sampled_space.hpp"
#include "hypcert/rng.hpp"

namespace hypcert::graph {

struct edge {
  int u = 0;
  int v = 0;
  double w = 1.0;
};

/** @brief Marker for the (empty) boundary of a finite graph. */
struct no_boundary {
  bool operator==(const no_boundary&) const { return true; }
};
struct no_line {};

/**
 * @brief Finite weighted graph with its shortest-path metric.
 *
 * Isometries are vertex permutations preserving the distance table. The
 * graph must be connected so that the metric is finite.
 */
class metric_graph {
public:
  using point = int;
  using isometry = std::vector<int>;
  using boundary = no_boundary;
  using line = no_line;
  using real = double;

  static constexpr const char* name = "graph";

  metric_graph() = default;

  metric_graph(int n, std::vector<edge> edges) : n_(n), edges_(std::move(edges)) {
    if (n < 1) throw input_error("graph needs at least one vertex");
    const double inf = std::numeric_limits<double>::infinity();
    table_.assign(static_cast<std::size_t>(n) * n, inf);
    next_.assign(static_cast<std::size_t>(n) * n, -1);
    for (int i = 0; i < n; ++i) {
      at(i, i) = 0.0;
      next_[idx(i, i)] = i;
    }
    for (const auto& e : edges_) {
      if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n) throw input_error("edge endpoint out of range");
      if (!(e.w > 0) || !std::isfinite(e.w)) throw input_error("edge weights must be positive and finite");
      if (e.w < at(e.u, e.v)) {
        at(e.u, e.v) = at(e.v, e.u) = e.w;
        next_[idx(e.u, e.v)] = e.v;
        next_[idx(e.v, e.u)] = e.u;
      }
    }
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) {
        if (at(i, k) == inf) continue;
        for (int j = 0; j < n; ++j) {
          double via = at(i, k) + at(k, j);
          if (via < at(i, j)) {
            at(i, j) = via;
            next_[idx(i, j)] = next_[idx(i, k)];
          }
        }
      }
    for (double d : table_)
      if (d == inf) throw input_error("graph is disconnected");
  }

  int size() const { return n_; }
  const std::vector<edge>& edges() const { return edges_; }

  double distance(int p, int q) const {
    check(p);
    check(q);
    return table_[idx(p, q)];
  }

  /// A registered isometry must be a permutation preserving the table exactly.
  void validate(const isometry& g) const {
    if (static_cast<int>(g.size()) != n_) throw input_error("permutation has the wrong length");
    std::vector<char> seen(static_cast<std::size_t>(n_), 0);
    for (int x : g) {
      if (x < 0 || x >= n_ || seen[static_cast<std::size_t>(x)]) throw input_error("not a permutation");
      seen[static_cast<std::size_t>(x)] = 1;
    }
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        if (table_[idx(i, j)] != table_[idx(g[i], g[j])]) throw input_error("permutation is not a graph isometry");
  }

  point apply(const isometry& g, int p) const {
    check(p);
    return g.at(static_cast<std::size_t>(p));
  }
  isometry compose(const isometry& g, const isometry& h) const {
    isometry out(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) out[i] = g[static_cast<std::size_t>(h[i])];
    return out;
  }
  isometry inverse(const isometry& g) const {
    isometry out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[static_cast<std::size_t>(g[i])] = static_cast<int>(i);
    return out;
  }
  isometry identity() const {
    isometry out(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) out[static_cast<std::size_t>(i)] = i;
    return out;
  }
  isometry power(const isometry& g, long k) const {
    isometry base = k < 0 ? inverse(g) : g, out = identity();
    for (long i = 0; i < std::labs(k); ++i) out = compose(base, out);
    return out;
  }
  bool is_identity(const isometry& g, double = 0) const { return g == identity(); }
  bool same(const isometry& g, const isometry& h, double = 0) const { return g == h; }

  /// Vertex path of a shortest path.
  std::vector<int> path(int p, int q) const {
    check(p);
    check(q);
    std::vector<int> out{p};
    while (p != q) {
      p = next_[idx(p, q)];
      out.push_back(p);
    }
    return out;
  }

  /// Vertex on a shortest [p,q] path whose distance from p is closest to s.
  point geodesic_point(int p, int q, double s) const {
    auto pth = path(p, q);
    int best = p;
    double gap = std::numeric_limits<double>::infinity();
    for (int v : pth) {
      double g = std::fabs(distance(p, v) - s);
      if (g < gap) {
        gap = g;
        best = v;
      }
    }
    return best;
  }

  point base_point() const { return 0; }

  std::vector<int> ball(int center, double R, double tol = default_tolerance) const {
    std::vector<int> out;
    for (int v = 0; v < n_; ++v)
      if (distance(center, v) <= R + tol) out.push_back(v);
    return out;
  }

  sampled_space to_sampled(const std::vector<int>& pts, std::optional<std::string> provenance = std::nullopt) const {
    std::vector<std::string> ids;
    for (int v : pts) ids.push_back(std::to_string(v));
    return sampled_space::from_points(pts, ids, [&](int a, int b) { return distance(a, b); }, std::move(provenance));
  }

  /// All vertices of the closed ball if at most n, else the n nearest (ties by index).
  sampled_space sample_ball(int center, double R, std::size_t n) const {
    auto pts = ball(center, R);
    std::stable_sort(pts.begin(), pts.end(), [&](int a, int b) { return distance(center, a) < distance(center, b); });
    if (pts.size() > n) pts.resize(n);
    std::sort(pts.begin(), pts.end());
    return to_sampled(pts, "graph ball center=" + std::to_string(center) + " R=" + std::to_string(R));
  }

private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j); }
  double& at(int i, int j) { return table_[idx(i, j)]; }
  void check(int p) const {
    if (p < 0 || p >= n_) throw input_error("vertex outside the graph");
  }

  int n_ = 0;
  std::vector<edge> edges_;
  std::vector<double> table_;
  std::vector<int> next_;
};

/// n x n unit grid graph, vertices numbered row-major.
inline metric_graph grid(int n) {
  std::vector<edge> e;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      int v = r * n + c;
      if (c + 1 < n) e.push_back({v, v + 1, 1.0});
      if (r + 1 < n) e.push_back({v, v + n, 1.0});
    }
  return metric_graph(n * n, std::move(e));
}

inline metric_graph cycle(int n) {
  std::vector<edge> e;
  for (int v = 0; v < n; ++v) e.push_back({v, (v + 1) % n, 1.0});
  return metric_graph(n, std::move(e));
}

/// Seeded connected random graph: a random spanning tree plus extra edges.
inline metric_graph random_graph(int n, double extra_edge_prob, std::uint64_t seed, double w_lo = 0.5,
                                 double w_hi = 2.0) {
  rng gen(seed);
  std::vector<edge> e;
  for (int v = 1; v < n; ++v)
    e.push_back({static_cast<int>(gen.below(static_cast<std::uint64_t>(v))), v, gen.uniform(w_lo, w_hi)});
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (gen.uniform() < extra_edge_prob) e.push_back({u, v, gen.uniform(w_lo, w_hi)});
  return metric_graph(n, std::move(e));
}

}  // namespace hypcert::graph
