// SPDX-License-Identifier: Apache-2.0
//
// Portable seeded randomness. Every draw in copas goes through SplitMix64 so
// results do not depend on the standard library's distribution algorithms.

#ifndef COPAS_RNG_H_
#define COPAS_RNG_H_

#include <cstdint>
#include <vector>

namespace copas {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seed for repeat/tree `index` under `master`: mix(master + gamma * (index + 1)).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64_mix(master + kGoldenGamma * (index + 1));
}

class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += kGoldenGamma;
    return splitmix64_mix(state_);
  }

  // Uniform integer in [0, n), by rejection so every value is equally likely.
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return x % n;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // First `k` entries of a partial Fisher-Yates shuffle of `items`.
  template <typename T>
  std::vector<T> sample_without_replacement(std::vector<T> items, std::size_t k) {
    if (k > items.size()) k = items.size();
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(uniform_index(items.size() - i));
      std::swap(items[i], items[j]);
    }
    items.resize(k);
    return items;
  }

private:
  std::uint64_t state_;
};

} // namespace copas

#endif // COPAS_RNG_H_
