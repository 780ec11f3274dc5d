#pragma once

#include <cstdint>
#include <random>

namespace optdp {

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Stream-split rule: substream `index` of a run seeded with `seed` is an
/// mt19937_64 seeded with splitmix64(seed ^ splitmix64(index)). Every
/// trajectory or trial owns one substream, so results do not depend on the
/// order in which substreams are consumed.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(index)));
}

/// Uniform double in [0,1) from the top 53 bits of one draw. Unlike
/// std::uniform_real_distribution the mapping is fixed across standard
/// libraries.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * uniform01(gen);
}

/// Uniform integer in [0, n) by multiply-shift; n must be positive.
inline std::uint64_t uniform_index(std::mt19937_64& gen, std::uint64_t n) {
  __extension__ using u128 = unsigned __int128;
  return static_cast<std::uint64_t>((static_cast<u128>(gen()) * n) >> 64);
}

}  // namespace optdp
