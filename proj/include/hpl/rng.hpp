#pragma once

// Counter-based random number generation. Every draw is a pure function of
// (stream seed, draw index), so replications can be generated in any order,
// on any number of workers, with bit-identical results.

#include <bit>
#include <cstdint>
#include <vector>

#include "hpl/stats.hpp"

namespace hpl {

/// SplitMix64 finalizer; the core 64-bit mixing primitive for seed derivation.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Order-sensitive combination of 64-bit words into one seed.
inline std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  return mix64(h ^ (v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2)));
}

namespace detail {

struct PhiloxOutput {
  std::uint32_t v[4];
};

/// Philox-4x32-10 block function (Salmon et al. counter-based generator).
inline PhiloxOutput philox4x32(std::uint64_t key, std::uint64_t ctr_lo,
                               std::uint64_t ctr_hi) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;

  std::uint32_t c0 = static_cast<std::uint32_t>(ctr_lo);
  std::uint32_t c1 = static_cast<std::uint32_t>(ctr_lo >> 32);
  std::uint32_t c2 = static_cast<std::uint32_t>(ctr_hi);
  std::uint32_t c3 = static_cast<std::uint32_t>(ctr_hi >> 32);
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);

  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c0;
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c2;
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t n0 = hi1 ^ c1 ^ k0;
    const std::uint32_t n1 = lo1;
    const std::uint32_t n2 = hi0 ^ c3 ^ k1;
    const std::uint32_t n3 = lo0;
    c0 = n0;
    c1 = n1;
    c2 = n2;
    c3 = n3;
    k0 += kW0;
    k1 += kW1;
  }
  return PhiloxOutput{{c0, c1, c2, c3}};
}

/// Uniform double in (0, 1), strictly interior, from a 64-bit word.
inline double uniform_from_bits(std::uint64_t u) {
  return (static_cast<double>(u >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace detail

/// Deterministic stream of standard normal variates addressed by index.
/// normal(i) is a pure function of (seed, i): Philox supplies 128 uniform
/// bits per block and the inverse normal CDF maps them to N(0, 1).
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : seed_(seed) {}

  double normal(std::uint64_t i) const {
    const auto out = detail::philox4x32(seed_, i >> 1, 0);
    const unsigned lane = static_cast<unsigned>(i & 1u);
    const std::uint64_t bits =
        (static_cast<std::uint64_t>(out.v[2 * lane + 1]) << 32) |
        out.v[2 * lane];
    return normal_quantile(detail::uniform_from_bits(bits));
  }

  /// Fills dst with normals at indices [first, first + dst.size()).
  void fill_normal(std::vector<double>& dst, std::uint64_t first = 0) const {
    fill_normal(dst.data(), dst.size(), first);
  }

  /// Fills dst[0..n) with normals at indices [first, first + n).
  void fill_normal(double* dst, std::size_t n, std::uint64_t first = 0) const {
    std::uint64_t i = first;
    std::size_t j = 0;
    while (j < n) {
      const auto out = detail::philox4x32(seed_, i >> 1, 0);
      for (unsigned lane = static_cast<unsigned>(i & 1u); lane < 2 && j < n;
           ++lane, ++i, ++j) {
        const std::uint64_t bits =
            (static_cast<std::uint64_t>(out.v[2 * lane + 1]) << 32) |
            out.v[2 * lane];
        dst[j] = normal_quantile(detail::uniform_from_bits(bits));
      }
    }
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

inline std::uint64_t double_bits(double x) {
  return std::bit_cast<std::uint64_t>(x);
}

}  // namespace hpl
