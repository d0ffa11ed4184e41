#pragma once

#include <cstdint>
#include <random>

namespace qnav {

using Engine = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent stream for work item `index` under a master seed. The result
/// depends only on (seed, index), never on which thread runs the item.
inline Engine substream(std::uint64_t seed, std::uint64_t index) {
  return Engine{splitmix64(splitmix64(seed) ^ splitmix64(~index))};
}

template <std::uniform_random_bit_generator Rng>
double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>{0.0, 1.0}(rng);
}

}  // namespace qnav
