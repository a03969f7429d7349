#pragma once

#include <cstdint>
#include <random>

namespace wcon {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based substream derivation: one independent engine per
/// (iteration, agent) pair, so results do not depend on thread scheduling.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t k, std::uint64_t i) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(k + 0x9e3779b97f4a7c15ULL * (i + 1))));
}

}  // namespace wcon
