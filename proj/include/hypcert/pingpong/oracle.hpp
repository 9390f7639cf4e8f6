#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <type_traits>
#include <utility>
#include <vector>

#include "hypcert/error.hpp"
#include "hypcert/model/free_tree.hpp"
#include "hypcert/model/h2.hpp"
#include "hypcert/word.hpp"

namespace hypcert {

enum class word_kind { group, semigroup };

inline const char* to_string(word_kind k) { return k == word_kind::group ? "group" : "semigroup"; }

inline constexpr std::size_t default_word_budget = 1'000'000;

/// Number of reduced words of length 1..max_len on k generators (all signs).
inline std::size_t reduced_word_count(int k, int max_len) {
  std::size_t total = 0, level = 2 * static_cast<std::size_t>(k);
  for (int len = 1; len <= max_len; ++len) {
    total += level;
    level *= 2 * static_cast<std::size_t>(k) - 1;
  }
  return total;
}

/// Number of positive words of length 1..max_len on k generators.
inline std::size_t positive_word_count(int k, int max_len) {
  std::size_t total = 0, level = static_cast<std::size_t>(k);
  for (int len = 1; len <= max_len; ++len) {
    total += level;
    level *= static_cast<std::size_t>(k);
  }
  return total;
}

namespace detail {
/// Deepest length whose cumulative count stays inside the budget.
inline int depth_within(std::size_t budget, int max_len, const std::function<std::size_t(int)>& count) {
  int d = 0;
  while (d < max_len && count(d + 1) <= budget) ++d;
  return d;
}
}  // namespace detail

/**
 * @brief Visit every freely reduced word of length 1..max_len on k letters
 * in shortlex order; the visitor returns false to stop early.
 */
inline std::size_t for_each_reduced_word(int k, int max_len, const std::function<bool(const word&)>& visit,
                                         std::size_t budget = default_word_budget) {
  if (k < 1) throw input_error("need at least one generator");
  if (max_len < 1) throw input_error("maximal word length must be at least 1");
  if (reduced_word_count(k, max_len) > budget)
    throw budget_error("word enumeration exceeds budget",
                       static_cast<std::size_t>(detail::depth_within(
                           budget, max_len, [k](int d) { return reduced_word_count(k, d); })));
  std::size_t seen = 0;
  word w;
  std::function<bool(int)> rec = [&](int remaining) -> bool {
    if (remaining == 0) {
      ++seen;
      return visit(w);
    }
    for (int key = 0; key < 2 * k; ++key) {
      int x = words::letter_from_key(key);
      if (!w.empty() && w.back() == -x) continue;
      w.push_back(x);
      bool go = rec(remaining - 1);
      w.pop_back();
      if (!go) return false;
    }
    return true;
  };
  for (int len = 1; len <= max_len; ++len)
    if (!rec(len)) break;
  return seen;
}

inline std::vector<word> enumerate_words(int k, int max_len, std::size_t budget = default_word_budget) {
  std::vector<word> out;
  for_each_reduced_word(k, max_len, [&](const word& w) {
    out.push_back(w);
    return true;
  }, budget);
  return out;
}

/// Product of gens along a word; letter i means gens[i-1], -i its inverse.
template <class Model>
typename Model::isometry evaluate(const Model& m, const std::vector<typename Model::isometry>& gens, const word& w) {
  auto g = m.identity();
  for (int x : w) {
    const auto& s = gens.at(static_cast<std::size_t>(std::abs(x) - 1));
    g = m.compose(g, x > 0 ? s : m.inverse(s));
  }
  return g;
}

struct oracle_result {
  bool passed = true;
  word_kind kind = word_kind::group;
  int depth = 0;
  std::size_t words_checked = 0;
  /// Group mode: the shortlex-first word equal to the identity.
  /// Semigroup mode: u v^-1 for the first coinciding pair.
  std::optional<word> counterexample;
  std::optional<std::pair<word, word>> coinciding;
};

namespace detail {

template <class Model>
struct level_entry {
  word w;
  typename Model::isometry g;
};

template <class Model>
std::optional<std::pair<word, word>> first_coincidence(const Model& m, const std::vector<typename Model::isometry>& gens,
                                                       const std::vector<level_entry<Model>>& all, double tol) {
  std::optional<std::pair<word, word>> best;
  if constexpr (std::is_same_v<Model, ftree::free_tree>) {
    (void)tol;
    (void)gens;
    auto consider = [&](const word& u, const word& v) {
      // v is the later word in shortlex order
      std::pair<word, word> cand = words::shortlex_less(u, v) ? std::pair{u, v} : std::pair{v, u};
      if (!best || words::shortlex_less(cand.second, best->second) ||
          (cand.second == best->second && words::shortlex_less(cand.first, best->first)))
        best = cand;
    };
    std::map<word, const word*> seen;
    for (const auto& e : all) {
      auto [it, fresh] = seen.emplace(e.g, &e.w);
      if (!fresh) consider(*it->second, e.w);
    }
  } else {
    // Large entries make g ~ h unreliable; u = v iff the reduced word u'^-1 v'
    // left after cancelling the common prefix evaluates to the identity.
    for (std::size_t j = 0; j < all.size() && !best; ++j) {
      for (std::size_t i = 0; i < j; ++i) {
        const word& u = all[i].w;
        const word& v = all[j].w;
        std::size_t c = 0;
        while (c < u.size() && c < v.size() && u[c] == v[c]) ++c;
        auto g = m.identity();
        for (std::size_t k = u.size(); k-- > c;) g = m.compose(g, m.inverse(gens[static_cast<std::size_t>(u[k] - 1)]));
        for (std::size_t k = c; k < v.size(); ++k) g = m.compose(g, gens[static_cast<std::size_t>(v[k] - 1)]);
        if (m.is_identity(g, tol)) {
          best = std::pair{u, v};
          break;
        }
      }
    }
  }
  return best;
}

}  // namespace detail

/**
 * @brief Brute-force freeness check: no nonempty reduced word up to depth is
 * the identity (group), or all positive words up to depth are distinct
 * (semigroup).
 */
template <class Model>
oracle_result word_oracle(const Model& m, const std::vector<typename Model::isometry>& gens, int depth,
                          word_kind kind, std::size_t budget = default_word_budget,
                          double tol = default_tolerance) {
  if (depth < 1) throw input_error("oracle depth must be at least 1");
  if (gens.empty()) throw input_error("oracle needs at least one generator");
  const int k = static_cast<int>(gens.size());
  oracle_result res;
  res.kind = kind;
  res.depth = depth;
  const bool group = kind == word_kind::group;
  std::function<std::size_t(int)> count = [&](int d) {
    return group ? reduced_word_count(k, d) : positive_word_count(k, d);
  };
  if (count(depth) > budget)
    throw budget_error("word oracle exceeds budget", static_cast<std::size_t>(detail::depth_within(budget, depth, count)));
  if constexpr (!std::is_same_v<Model, ftree::free_tree>) {
    // semigroup mode compares all pairs; allow 64 comparisons per budgeted word
    std::function<std::size_t(int)> pairs = [&](int d) {
      std::size_t n = count(d);
      return n * (n - 1) / 128;
    };
    if (!group && pairs(depth) > budget)
      throw budget_error("semigroup oracle comparisons exceed budget",
                         static_cast<std::size_t>(detail::depth_within(budget, depth, pairs)));
  }

  std::vector<typename Model::isometry> letter(2 * static_cast<std::size_t>(k));
  for (int key = 0; key < 2 * k; ++key) {
    int x = words::letter_from_key(key);
    const auto& s = gens[static_cast<std::size_t>(std::abs(x) - 1)];
    letter[static_cast<std::size_t>(key)] = x > 0 ? s : m.inverse(s);
  }

  std::vector<detail::level_entry<Model>> level{{word{}, m.identity()}};
  std::vector<detail::level_entry<Model>> all;
  for (int len = 1; len <= depth; ++len) {
    std::vector<detail::level_entry<Model>> next;
    for (const auto& e : level) {
      for (int key = 0; key < 2 * k; ++key) {
        int x = words::letter_from_key(key);
        if (!group && x < 0) continue;
        if (!e.w.empty() && e.w.back() == -x) continue;
        word w = e.w;
        w.push_back(x);
        auto g = m.compose(e.g, letter[static_cast<std::size_t>(key)]);
        ++res.words_checked;
        if (group && m.is_identity(g, tol)) {
          // levels are built in shortlex order, so the first hit is minimal
          res.passed = false;
          res.counterexample = w;
          return res;
        }
        next.push_back({std::move(w), std::move(g)});
      }
    }
    if (!group) all.insert(all.end(), next.begin(), next.end());
    level = std::move(next);
  }
  if (!group) {
    if (auto hit = detail::first_coincidence(m, gens, all, tol)) {
      res.passed = false;
      res.coinciding = hit;
      res.counterexample = words::multiply(hit->first, words::inverse(hit->second));
    }
  }
  return res;
}

}  // namespace hypcert
