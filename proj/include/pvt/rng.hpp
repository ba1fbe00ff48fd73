#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace pvt {

using Engine = std::mt19937_64;

namespace detail {
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Deterministic seed for replicate `index`, retry `attempt` of a run with
/// master seed `seed`. Distinct triples give statistically independent
/// streams.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index,
                                    std::uint64_t attempt = 0) {
  std::uint64_t h = detail::splitmix64(seed);
  h = detail::splitmix64(h ^ index);
  h = detail::splitmix64(h ^ (attempt * 0xd1b54a32d192ed03ULL));
  return h;
}

inline Engine make_engine(std::uint64_t seed, std::uint64_t index,
                          std::uint64_t attempt = 0) {
  return Engine(stream_seed(seed, index, attempt));
}

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Uniform double in (0, 1].
inline double uniform01_open_low(Engine& eng) {
  return (static_cast<double>(eng() >> 11) + 1.0) * 0x1.0p-53;
}

inline double exponential(Engine& eng, double rate) {
  return -std::log(uniform01_open_low(eng)) / rate;
}

}  // namespace pvt
