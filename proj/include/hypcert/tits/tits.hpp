#pragma once

#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hypcert/analysis/classify.hpp"
#include "hypcert/error.hpp"
#include "hypcert/pingpong/oracle.hpp"
#include "hypcert/pingpong/pingpong.hpp"
#include "hypcert/word.hpp"

namespace hypcert {

namespace detail {
inline bool same_point(const h2::boundary& u, const h2::boundary& v) { return h2::same_boundary(u, v); }
inline bool same_point(const ftree::ray& u, const ftree::ray& v) { return u == v; }
inline bool same_point(const graph::no_boundary&, const graph::no_boundary&) { return true; }
}  // namespace detail

/// Equal boundary fixed sets; elliptic input is a domain error.
template <class Model>
bool is_elementary_pair(const Model& m, const typename Model::isometry& a, const typename Model::isometry& b) {
  auto pa = classify(m, a), pb = classify(m, b);
  if (pa.kind == isometry_kind::elliptic || pb.kind == isometry_kind::elliptic)
    throw domain_error("elementary-pair test needs non-elliptic isometries");
  const auto& fa = pa.fixed_boundary;
  const auto& fb = pb.fixed_boundary;
  if (fa.size() != fb.size()) return false;
  auto contains = [](const auto& set, const auto& u) {
    for (const auto& v : set)
      if (detail::same_point(u, v)) return true;
    return false;
  };
  for (const auto& u : fa)
    if (!contains(fb, u)) return false;
  for (const auto& u : fb)
    if (!contains(fa, u)) return false;
  return true;
}

enum class tits_case { small_ell, large_ell_group, large_ell_semigroup };

inline const char* to_string(tits_case c) {
  switch (c) {
    case tits_case::small_ell: return "small_ell";
    case tits_case::large_ell_group: return "large_ell_group";
    case tits_case::large_ell_semigroup: return "large_ell_semigroup";
  }
  return "?";
}

struct tits_config {
  double delta = 1.0;
  double eps0 = 0.1;
  long N_max = 64;
  int conj_max = 16;
  int oracle_depth = 8;
  word_kind mode = word_kind::group;
  pingpong_sampling sample{};
  margin_budget margin{};
  std::size_t word_budget = default_word_budget;
  /// Candidate words examined by the small-ell fallback.
  std::size_t search_budget = 20'000;
};

template <class Model>
struct tits_witness_result {
  tits_case case_tag = tits_case::small_ell;
  long N = 1;
  word w;
  std::string route;  // "pingpong", "margin" or "oracle"
  bool b_conjugated = false;
  free_certificate<Model> certificate;
  std::size_t words_examined = 0;
  double seconds = 0.0;
};

namespace detail {

inline word conj_word(int j) {
  // b^j a b^-j
  word w(static_cast<std::size_t>(j), 2);
  w.push_back(1);
  for (int k = 0; k < j; ++k) w.push_back(-2);
  return w;
}

template <class Model>
bool usable_partner(const Model& m, const typename Model::isometry& a, const typename Model::isometry& g) {
  auto p = classify(m, g);
  if (p.kind == isometry_kind::elliptic) return false;
  return !is_elementary_pair(m, a, g);
}

template <class Model>
void refuse_elliptic(const Model& m, const typename Model::isometry& g, const char* name, int depth,
                     std::size_t budget) {
  auto orc = word_oracle(m, {g}, depth, word_kind::group, budget);
  if (!orc.passed)
    throw input_error(std::string("generator ") + name + " has finite order (" +
                      words::format(*orc.counterexample, 1) + " is the identity); the torsion-free "
                      "hypothesis fails");
  throw input_error(std::string("generator ") + name + " is elliptic; group certification needs non-elliptic input");
}

/// Oracle-only certificate for <a^N, g>; kind and depth from the config.
template <class Model>
free_certificate<Model> oracle_certificate(const Model& m, const typename Model::isometry& a,
                                           const typename Model::isometry& g, long N, const word& w,
                                           const tits_config& cfg) {
  free_certificate<Model> c;
  c.kind = cfg.mode;
  c.generators = {m.power(a, N), g};
  c.N = N;
  c.witness = w;
  c.geometric_checked = false;
  c.notes.push_back("no explicit geometric constant for this branch; evidence is the word oracle only");
  finish_certificate(m, c, cfg.oracle_depth, cfg.word_budget);
  return c;
}

}  // namespace detail

/**
 * @brief Search for (N, w) with <a^N, w> free (or a free semigroup),
 * returning the first certified witness in the fixed search order.
 */
template <class Model>
tits_witness_result<Model> tits_witness(const Model& m, const typename Model::isometry& a,
                                        const typename Model::isometry& b, const tits_config& cfg = {}) {
  using iso = typename Model::isometry;
  if (!(cfg.eps0 > 0)) throw input_error("eps0 must be positive");
  if (cfg.N_max < 1) throw input_error("N_max must be at least 1");
  const auto t_start = std::chrono::steady_clock::now();
  auto pa = classify(m, a);
  auto pb = classify(m, b);
  const bool group = cfg.mode == word_kind::group;
  if (pa.kind == isometry_kind::elliptic) {
    if (group) detail::refuse_elliptic(m, a, "a", cfg.oracle_depth, cfg.word_budget);
    throw input_error("generator a must be non-elliptic");
  }
  if (pb.kind == isometry_kind::elliptic && group) detail::refuse_elliptic(m, b, "b", cfg.oracle_depth, cfg.word_budget);

  tits_witness_result<Model> res;
  const std::vector<iso> ab{a, b};
  word bw{2};
  iso bprime = b;
  if (pb.kind == isometry_kind::elliptic || std::fabs(pa.ell - pb.ell) > 1e-9 * std::max(1.0, pa.ell)) {
    bw = word{2, 1, -2};
    bprime = evaluate(m, ab, bw);
    res.b_conjugated = true;
  }
  if (is_elementary_pair(m, a, bprime)) throw elementary_error("the pair generates an elementary group");

  auto finish = [&](tits_case tag, long N, const word& w, std::string route, free_certificate<Model> cert) {
    res.case_tag = tag;
    res.N = N;
    res.w = w;
    res.route = std::move(route);
    res.certificate = std::move(cert);
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return res;
  };

  const double ell = pa.ell;
  if (pa.kind == isometry_kind::hyperbolic && ell > cfg.eps0 / 3.0) {
    const tits_case tag = group ? tits_case::large_ell_group : tits_case::large_ell_semigroup;
    std::vector<word> cands{bw};
    for (int j = 1; j <= cfg.conj_max; ++j) {
      word w = detail::conj_word(j);
      if (w != bw) cands.push_back(w);
    }
    for (const auto& w : cands) {
      if (static_cast<long>(w.size()) > cfg.N_max) continue;
      iso g = evaluate(m, ab, w);
      ++res.words_examined;
      if (!detail::usable_partner(m, a, g)) continue;
      long N = 0;
      try {
        N = min_free_power(m, a, g, cfg.delta);
      } catch (const error&) {
        continue;
      }
      if (N > cfg.N_max) continue;
      auto cert = pingpong_certify(m, a, g, N, cfg.delta, cfg.sample, cfg.oracle_depth, cfg.word_budget);
      if (!group) {
        cert.kind = word_kind::semigroup;
        cert.notes.push_back("semigroup certificate from the free group <a^N, w^N>");
        detail::finish_certificate(m, cert, cfg.oracle_depth, cfg.word_budget);
      }
      cert.witness = w;
      if (cert.valid) return finish(tag, N, w, "pingpong", std::move(cert));
    }
    throw search_exhausted("no certified witness among the conjugate candidates", res.words_examined);
  }

  // small translation length: separated Margulis domains of conjugates first
  for (int j = 1; j <= cfg.conj_max; ++j) {
    word w = detail::conj_word(j);
    if (static_cast<long>(w.size()) > cfg.N_max) break;
    iso g = evaluate(m, ab, w);
    ++res.words_examined;
    if (!detail::usable_partner(m, a, g)) continue;
    margin_budget mb = cfg.margin;
    mb.one_sided = !group;
    auto mg = schottky_margin(m, a, g, cfg.delta, mb);
    if (!mg.passes || !mg.separation || !mg.separation->holds) continue;
    free_certificate<Model> cert;
    cert.kind = cfg.mode;
    cert.generators = {a, g};
    cert.N = 1;
    cert.witness = w;
    cert.geometric_checked = true;
    cert.geometric_passed = true;
    cert.evidence = mg;
    detail::finish_certificate(m, cert, cfg.oracle_depth, cfg.word_budget);
    if (cert.valid) return finish(tits_case::small_ell, 1, w, "margin", std::move(cert));
  }

  // fallback: shortlex search over words, certified by the oracle alone
  std::optional<tits_witness_result<Model>> found;
  std::size_t tried = 0;
  const int max_len = static_cast<int>(std::min<long>(cfg.N_max, 64));
  word cur;
  std::function<bool(int)> rec = [&](int remaining) -> bool {
    if (remaining == 0) {
      if (++tried > cfg.search_budget) return false;
      ++res.words_examined;
      iso g = evaluate(m, ab, cur);
      if (!detail::usable_partner(m, a, g)) return true;
      std::vector<long> signs{1};
      if (!group) signs.push_back(-1);
      for (long sgn : signs) {
        iso base = sgn > 0 ? a : m.inverse(a);
        auto cert = detail::oracle_certificate(m, base, g, 1, cur, cfg);
        if (cert.valid) {
          if (sgn < 0) cert.notes.push_back("semigroup generated by a^-N and w");
          found = finish(tits_case::small_ell, 1, cur, "oracle", std::move(cert));
          return false;
        }
      }
      return true;
    }
    for (int key = 0; key < 4; ++key) {
      int x = words::letter_from_key(key);
      if (!cur.empty() && cur.back() == -x) continue;
      cur.push_back(x);
      bool go = rec(remaining - 1);
      cur.pop_back();
      if (!go) return false;
    }
    return true;
  };
  for (int len = 1; len <= max_len && !found && tried <= cfg.search_budget; ++len) rec(len);
  if (found) return *found;
  throw search_exhausted("no oracle-certified witness within the word budget", res.words_examined);
}

}  // namespace hypcert
