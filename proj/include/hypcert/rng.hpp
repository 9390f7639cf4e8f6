#pragma once

#include <cstdint>
#include <random>

namespace hypcert {

/**
 * @brief Seeded generator with platform-independent derived distributions.
 *
 * The standard distribution adaptors are implementation-defined, so golden
 * outputs would drift between standard libraries. These helpers only rely on
 * the raw mt19937_64 stream, whose output is fixed by the standard.
 */
class rng {
public:
  explicit rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n), rejection sampled to avoid modulo bias.
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do v = engine_(); while (v >= limit);
    return v % n;
  }

private:
  std::mt19937_64 engine_;
};

}  // namespace hypcert
