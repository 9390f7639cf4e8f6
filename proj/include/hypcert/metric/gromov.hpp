#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>

#include "hypcert/error.hpp"
#include "hypcert/metric/sampled_space.hpp"
#include "hypcert/rng.hpp"

namespace hypcert {

/// (y,z)_x from three pairwise distances.
inline double gromov_from_distances(double dxy, double dxz, double dyz) {
  double g = 0.5 * (dxy + dxz - dyz);
  return std::clamp(g, 0.0, std::min(dxy, dxz));
}

inline double gromov_product(const sampled_space& s, std::size_t y, std::size_t z, std::size_t base) {
  return gromov_from_distances(s.d(base, y), s.d(base, z), s.d(y, z));
}

inline double gromov_product(const sampled_space& s, const std::string& y, const std::string& z,
                             const std::string& base) {
  return gromov_product(s, s.index_of(y), s.index_of(z), s.index_of(base));
}

/// Model version: any type with a distance(p, q) member.
template <class Model, class Point>
auto gromov_product(const Model& m, const Point& y, const Point& z, const Point& base)
    -> decltype(m.distance(y, z), double()) {
  return gromov_from_distances(static_cast<double>(m.distance(base, y)),
                               static_cast<double>(m.distance(base, z)),
                               static_cast<double>(m.distance(y, z)));
}

struct hyperbolicity_estimate {
  enum class mode_t { exhaustive, sampled };
  double delta_hat = 0.0;
  std::uint64_t quadruples_checked = 0;
  mode_t mode = mode_t::exhaustive;
  std::array<std::string, 4> worst_quadruple{};
};

/// Defect (A - B)/2 of one quadruple, A >= B >= C its pairing sums.
inline double quadruple_defect(double s1, double s2, double s3) {
  if (s1 < s2) std::swap(s1, s2);
  if (s2 < s3) std::swap(s2, s3);
  if (s1 < s2) std::swap(s1, s2);
  return 0.5 * (s1 - s2);
}

struct delta_budget {
  enum class kind_t { exhaustive, sample };
  kind_t kind = kind_t::exhaustive;
  std::uint64_t n = 0;  // sampled quadruples
  std::uint64_t seed = 0;
  std::size_t cap = 200;  // exhaustive point cap

  static delta_budget exhaustive(std::size_t cap = 200) { return {kind_t::exhaustive, 0, 0, cap}; }
  static delta_budget sample(std::uint64_t n, std::uint64_t seed) { return {kind_t::sample, n, seed, 0}; }
};

inline hyperbolicity_estimate four_point_delta(const sampled_space& s, delta_budget budget = {}) {
  const std::size_t n = s.size();
  if (n < 4) throw input_error("four-point delta needs at least 4 points");
  hyperbolicity_estimate est;
  std::array<std::size_t, 4> worst{0, 1, 2, 3};
  double best = 0.0;
  auto visit = [&](std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
    double v = quadruple_defect(s.d(i, j) + s.d(k, l), s.d(i, k) + s.d(j, l), s.d(i, l) + s.d(j, k));
    if (v > best) {
      best = v;
      worst = {i, j, k, l};
    }
  };
  if (budget.kind == delta_budget::kind_t::exhaustive) {
    if (n > budget.cap)
      throw budget_error("exhaustive four-point scan over " + std::to_string(n) +
                             " points exceeds cap " + std::to_string(budget.cap),
                         budget.cap);
    est.mode = hyperbolicity_estimate::mode_t::exhaustive;
    std::uint64_t count = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dij = s.d(i, j);
        for (std::size_t k = j + 1; k < n; ++k) {
          const double dik = s.d(i, k), djk = s.d(j, k);
          for (std::size_t l = k + 1; l < n; ++l) {
            double v = quadruple_defect(dij + s.d(k, l), dik + s.d(j, l), s.d(i, l) + djk);
            if (v > best) {
              best = v;
              worst = {i, j, k, l};
            }
          }
          count += n - k - 1;
        }
      }
    est.quadruples_checked = count;
  } else {
    est.mode = hyperbolicity_estimate::mode_t::sampled;
    rng gen(budget.seed);
    for (std::uint64_t t = 0; t < budget.n; ++t) {
      std::size_t q[4];
      for (auto& x : q) x = static_cast<std::size_t>(gen.below(n));
      visit(q[0], q[1], q[2], q[3]);
    }
    est.quadruples_checked = budget.n;
  }
  est.delta_hat = best;
  for (int t = 0; t < 4; ++t) est.worst_quadruple[t] = s.id(worst[t]);
  return est;
}

}  // namespace hypcert
