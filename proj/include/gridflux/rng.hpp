#pragma once

#include <cstdint>
#include <random>

namespace gridflux {

using Rng = std::mt19937_64;

enum class StreamPurpose : std::uint64_t {
  kArrival = 1,
  kDuration = 2,
  kPolicy = 3,
  kShuffle = 4,
  kInit = 5,
  kBaseline = 6,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Named stream keyed by (master seed, owner, slot, purpose); independent of
// the order in which streams are created.
inline Rng make_stream(std::uint64_t seed, std::uint64_t owner,
                       std::uint64_t slot, StreamPurpose purpose) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ (owner + 0x100000001b3ULL));
  h = splitmix64(h ^ (slot * 0x9e3779b97f4a7c15ULL + 17));
  h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
  return Rng(h);
}

}  // namespace gridflux
