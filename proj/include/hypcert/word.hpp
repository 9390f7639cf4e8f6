#pragma once

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "hypcert/error.hpp"

namespace hypcert {

/// A word over generators 1..k; a negative entry is the inverse letter.
using word = std::vector<int>;

namespace words {

inline word inverse(const word& w) {
  word out(w.rbegin(), w.rend());
  for (int& x : out) x = -x;
  return out;
}

inline bool is_reduced(const word& w) {
  for (std::size_t i = 1; i < w.size(); ++i)
    if (w[i] == -w[i - 1]) return false;
  return true;
}

inline word reduce(const word& w) {
  word out;
  out.reserve(w.size());
  for (int x : w) {
    if (!out.empty() && out.back() == -x)
      out.pop_back();
    else
      out.push_back(x);
  }
  return out;
}

/// Free product u*v, reduced; both arguments assumed reduced.
inline word multiply(const word& u, const word& v) {
  std::size_t cancel = 0;
  while (cancel < u.size() && cancel < v.size() &&
         u[u.size() - 1 - cancel] == -v[cancel])
    ++cancel;
  word out(u.begin(), u.end() - static_cast<std::ptrdiff_t>(cancel));
  out.insert(out.end(), v.begin() + static_cast<std::ptrdiff_t>(cancel), v.end());
  return out;
}

inline word power(const word& w, long n) {
  word base = n < 0 ? inverse(w) : w;
  word out;
  unsigned long k = static_cast<unsigned long>(std::labs(n));
  while (k) {
    if (k & 1) out = multiply(out, base);
    k >>= 1;
    if (k) base = multiply(base, base);
  }
  return out;
}

/// Shortlex key of a letter: a < a^-1 < b < b^-1 < ...
inline int letter_key(int x) { return 2 * (std::abs(x) - 1) + (x < 0 ? 1 : 0); }
inline int letter_from_key(int key) {
  int g = key / 2 + 1;
  return key % 2 ? -g : g;
}

inline bool shortlex_less(const word& u, const word& v) {
  if (u.size() != v.size()) return u.size() < v.size();
  for (std::size_t i = 0; i < u.size(); ++i)
    if (u[i] != v[i]) return letter_key(u[i]) < letter_key(v[i]);
  return false;
}

/// Split a reduced word as conj * core * conj^-1 with core cyclically reduced.
struct cyclic_split {
  word conj;
  word core;
};

inline cyclic_split cyclic_reduce(const word& w) {
  std::size_t lo = 0, hi = w.size();
  while (hi - lo >= 2 && w[lo] == -w[hi - 1]) {
    ++lo;
    --hi;
  }
  return {word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(lo)),
          word(w.begin() + static_cast<std::ptrdiff_t>(lo),
               w.begin() + static_cast<std::ptrdiff_t>(hi))};
}

inline std::vector<std::string> default_names(int rank) {
  std::vector<std::string> names;
  for (int i = 0; i < rank; ++i) names.emplace_back(1, static_cast<char>('a' + i));
  return names;
}

/// Parse "ab^-1", "a^3b^-2" style expressions. Names are single letters.
inline word parse(std::string_view text, const std::vector<std::string>& names) {
  word out;
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip_ws();
  if (i < text.size() && (text[i] == 'e' || text[i] == '1') && text.size() - i == 1) {
    bool e_is_name = std::find(names.begin(), names.end(), "e") != names.end();
    if (!e_is_name) return out;
  }
  while (i < text.size()) {
    skip_ws();
    if (i >= text.size()) break;
    std::string name(1, text[i]);
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end())
      throw input_error("unknown generator '" + name + "' in word '" + std::string(text) + "'");
    int letter = static_cast<int>(it - names.begin()) + 1;
    ++i;
    long exponent = 1;
    skip_ws();
    if (i < text.size() && text[i] == '^') {
      ++i;
      std::size_t start = i;
      if (i < text.size() && (text[i] == '-' || text[i] == '+')) ++i;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      std::string digits(text.substr(start, i - start));
      if (digits.empty() || digits == "-" || digits == "+")
        throw input_error("bad exponent in word '" + std::string(text) + "'");
      exponent = std::stol(digits);
    }
    for (long k = 0; k < std::labs(exponent); ++k) out.push_back(exponent < 0 ? -letter : letter);
  }
  return reduce(out);
}

inline word parse(std::string_view text, int rank) { return parse(text, default_names(rank)); }

/// Format with run-length exponents: a^2b^-1. The empty word prints as "e".
inline std::string format(const word& w, const std::vector<std::string>& names) {
  if (w.empty()) return "e";
  std::string out;
  std::size_t i = 0;
  while (i < w.size()) {
    std::size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    long run = static_cast<long>(j - i);
    int g = std::abs(w[i]);
    out += g <= static_cast<int>(names.size()) ? names[g - 1] : "g" + std::to_string(g);
    long exponent = w[i] < 0 ? -run : run;
    if (exponent != 1) out += "^" + std::to_string(exponent);
    i = j;
  }
  return out;
}

inline std::string format(const word& w, int rank = 26) { return format(w, default_names(rank)); }

}  // namespace words
}  // namespace hypcert
