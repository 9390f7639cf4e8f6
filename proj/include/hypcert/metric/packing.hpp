#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hypcert/error.hpp"
#include "hypcert/metric/sampled_space.hpp"

namespace hypcert {

enum class count_mode { exact, greedy };

struct packing_profile {
  std::string center;
  double R = 0.0;
  double r = 0.0;
  std::optional<std::size_t> pack_exact;
  std::size_t pack_greedy = 0;
  std::size_t cov_greedy = 0;
  std::optional<double> theoretical_bound;
  std::vector<std::string> witness;  // exact witness when available, else greedy
};

/// Budget failure that still carries the greedy answer.
class packing_budget_error : public budget_error {
public:
  packing_budget_error(const std::string& what, std::size_t greedy)
      : budget_error(what, greedy) {}
  std::size_t greedy() const noexcept { return reached(); }
};

inline std::vector<std::size_t> closed_ball(const sampled_space& s, std::size_t center, double R,
                                            double tol = default_tolerance) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.d(center, i) <= R + tol) out.push_back(i);
  return out;
}

namespace detail {

using mask = std::uint64_t;

inline int lowest(mask m) { return std::countr_zero(m); }

/// Maximum clique by greedy-colouring bound (Tomita style), n <= 64.
class max_clique {
public:
  explicit max_clique(std::vector<mask> adj) : adj_(std::move(adj)) {}

  std::vector<int> solve(std::vector<int> incumbent) {
    best_ = std::move(incumbent);
    mask all = adj_.size() == 64 ? ~mask{0} : ((mask{1} << adj_.size()) - 1);
    std::vector<int> current;
    expand(current, all);
    return best_;
  }

private:
  void colour_sort(mask p, std::vector<int>& order, std::vector<int>& bounds) const {
    int colour = 0;
    mask uncoloured = p;
    while (uncoloured) {
      ++colour;
      mask q = uncoloured;
      while (q) {
        int v = lowest(q);
        q &= ~(mask{1} << v);
        q &= ~adj_[v];
        uncoloured &= ~(mask{1} << v);
        order.push_back(v);
        bounds.push_back(colour);
      }
    }
  }

  void expand(std::vector<int>& current, mask p) {
    std::vector<int> order, bounds;
    colour_sort(p, order, bounds);
    for (std::size_t idx = order.size(); idx-- > 0;) {
      if (current.size() + static_cast<std::size_t>(bounds[idx]) <= best_.size()) return;
      int v = order[idx];
      current.push_back(v);
      mask np = p & adj_[v];
      if (np == 0) {
        if (current.size() > best_.size()) best_ = current;
      } else {
        expand(current, np);
      }
      current.pop_back();
      p &= ~(mask{1} << v);
    }
  }

  std::vector<mask> adj_;
  std::vector<int> best_;
};

}  // namespace detail

/// Greedy maximal subset of region with pairwise distances > 2r, scanned in index order.
inline std::vector<std::size_t> greedy_separated(const sampled_space& s, const std::vector<std::size_t>& region,
                                                 double r, double tol = default_tolerance) {
  std::vector<std::size_t> chosen;
  for (std::size_t p : region) {
    bool ok = std::all_of(chosen.begin(), chosen.end(), [&](std::size_t q) { return s.d(p, q) > 2 * r + tol; });
    if (ok) chosen.push_back(p);
  }
  return chosen;
}

/// Maximum subset of region that is strictly 2r-separated.
inline std::vector<std::size_t> max_separated(const sampled_space& s, const std::vector<std::size_t>& region,
                                              double r, count_mode mode, std::size_t cap = 64,
                                              double tol = default_tolerance) {
  auto greedy = greedy_separated(s, region, r, tol);
  if (mode == count_mode::greedy) return greedy;
  if (region.size() > cap || region.size() > 64)
    throw packing_budget_error("exact packing over " + std::to_string(region.size()) +
                                   " points exceeds cap " + std::to_string(std::min<std::size_t>(cap, 64)),
                               greedy.size());
  const std::size_t n = region.size();
  std::vector<detail::mask> adj(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && s.d(region[i], region[j]) > 2 * r + tol) adj[i] |= detail::mask{1} << j;
  std::vector<int> incumbent;
  for (std::size_t g : greedy)
    incumbent.push_back(static_cast<int>(std::find(region.begin(), region.end(), g) - region.begin()));
  auto best = detail::max_clique(adj).solve(incumbent);
  std::sort(best.begin(), best.end());
  std::vector<std::size_t> out;
  for (int v : best) out.push_back(region[static_cast<std::size_t>(v)]);
  return out;
}

/// Fewest sample points whose closed r-balls cover region.
inline std::size_t covering_number(const sampled_space& s, const std::vector<std::size_t>& region, double r,
                                   count_mode mode, std::size_t cap = 64, double tol = default_tolerance,
                                   std::vector<std::size_t>* centers_out = nullptr) {
  if (r <= 0) throw input_error("covering radius must be positive");
  if (region.empty()) {
    if (centers_out) centers_out->clear();
    return 0;
  }
  const std::size_t n = region.size();
  if (mode == count_mode::exact && n > std::min<std::size_t>(cap, 64)) {
    std::size_t g = covering_number(s, region, r, count_mode::greedy, cap, tol);
    throw packing_budget_error("exact covering over " + std::to_string(n) + " points exceeds cap", g);
  }
  // Coverage sets are bitmasks over region positions; for greedy mode on big
  // regions fall back to explicit vectors.
  if (n > 64) {
    std::vector<char> covered(n, 0);
    std::size_t left = n, count = 0;
    std::vector<std::size_t> centers;
    while (left > 0) {
      std::size_t best_c = 0, best_gain = 0;
      for (std::size_t c = 0; c < s.size(); ++c) {
        std::size_t gain = 0;
        for (std::size_t k = 0; k < n; ++k)
          if (!covered[k] && s.d(c, region[k]) <= r + tol) ++gain;
        if (gain > best_gain) {
          best_gain = gain;
          best_c = c;
        }
      }
      for (std::size_t k = 0; k < n; ++k)
        if (!covered[k] && s.d(best_c, region[k]) <= r + tol) {
          covered[k] = 1;
          --left;
        }
      centers.push_back(best_c);
      ++count;
    }
    if (centers_out) *centers_out = centers;
    return count;
  }
  using detail::mask;
  std::vector<mask> cover;
  std::vector<std::size_t> cover_center;
  for (std::size_t c = 0; c < s.size(); ++c) {
    mask m = 0;
    for (std::size_t k = 0; k < n; ++k)
      if (s.d(c, region[k]) <= r + tol) m |= mask{1} << k;
    if (m) {
      cover.push_back(m);
      cover_center.push_back(c);
    }
  }
  const mask all = n == 64 ? ~mask{0} : ((mask{1} << n) - 1);
  std::vector<std::size_t> greedy;
  {
    mask done = 0;
    while (done != all) {
      std::size_t best = 0;
      int gain = -1;
      for (std::size_t c = 0; c < cover.size(); ++c) {
        int g = std::popcount(cover[c] & ~done);
        if (g > gain) {
          gain = g;
          best = c;
        }
      }
      done |= cover[best];
      greedy.push_back(best);
    }
  }
  std::vector<std::size_t> best = greedy;
  if (mode == count_mode::exact) {
    int max_cover = 0;
    for (mask m : cover) max_cover = std::max(max_cover, std::popcount(m));
    std::vector<std::size_t> current;
    std::uint64_t nodes = 0;
    const std::uint64_t node_cap = 50'000'000;
    auto rec = [&](auto&& self, mask done) -> void {
      if (++nodes > node_cap)
        throw packing_budget_error("exact covering search exceeded node budget", greedy.size());
      if (done == all) {
        if (current.size() < best.size()) best = current;
        return;
      }
      int remaining = std::popcount(all & ~done);
      std::size_t lower = current.size() + static_cast<std::size_t>((remaining + max_cover - 1) / max_cover);
      if (lower >= best.size()) return;
      // branch on the uncovered element with the fewest covering centres
      int pick = -1, fewest = 1 << 30;
      for (mask rest = all & ~done; rest; rest &= rest - 1) {
        int k = detail::lowest(rest);
        int cnt = 0;
        for (mask m : cover) cnt += (m >> k) & 1;
        if (cnt < fewest) {
          fewest = cnt;
          pick = k;
        }
      }
      for (std::size_t c = 0; c < cover.size(); ++c) {
        if (!((cover[c] >> pick) & 1)) continue;
        current.push_back(c);
        self(self, done | cover[c]);
        current.pop_back();
      }
    };
    rec(rec, 0);
  }
  if (centers_out) {
    centers_out->clear();
    for (std::size_t c : best) centers_out->push_back(cover_center[c]);
    std::sort(centers_out->begin(), centers_out->end());
  }
  return best.size();
}

/// Pack(B(center, R), r) with profile data; exact mode falls back to greedy on budget.
inline packing_profile packing_number(const sampled_space& s, std::size_t center, double R, double r,
                                      count_mode mode, std::size_t cap = 64, double tol = default_tolerance) {
  if (!(r > 0) || R + tol < r) throw input_error("packing needs R >= r > 0");
  packing_profile p;
  p.center = s.id(center);
  p.R = R;
  p.r = r;
  auto ball = closed_ball(s, center, R, tol);
  auto greedy = greedy_separated(s, ball, r, tol);
  p.pack_greedy = greedy.size();
  p.cov_greedy = covering_number(s, ball, r, count_mode::greedy, cap, tol);
  std::vector<std::size_t> witness = greedy;
  if (mode == count_mode::exact) {
    witness = max_separated(s, ball, r, count_mode::exact, cap, tol);
    p.pack_exact = witness.size();
  }
  for (std::size_t i : witness) p.witness.push_back(s.id(i));
  return p;
}

inline packing_profile packing_number(const sampled_space& s, const std::string& center, double R, double r,
                                      count_mode mode, std::size_t cap = 64, double tol = default_tolerance) {
  return packing_number(s, s.index_of(center), R, r, mode, cap, tol);
}

/// sup over sample centres of Pack(B(x,R), r), exact.
inline std::size_t packing_function(const sampled_space& s, double R, double r, std::size_t cap = 64,
                                    double tol = default_tolerance) {
  std::size_t best = 0;
  for (std::size_t x = 0; x < s.size(); ++x)
    best = std::max(best, max_separated(s, closed_ball(s, x, R, tol), r, count_mode::exact, cap, tol).size());
  return best;
}

}  // namespace hypcert
