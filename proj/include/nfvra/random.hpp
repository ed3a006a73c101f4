#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace nfvra {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view text,
                             std::uint64_t hash = 0xcbf29ce484222325ULL) {
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

// Named sub-stream of a master seed. Streams with different names (or
// indices) are statistically independent, so e.g. arrival times can be
// held fixed while demands vary.
inline std::uint64_t stream_seed(std::uint64_t seed, std::string_view stream,
                                 std::uint64_t index = 0) {
  return splitmix64(splitmix64(seed ^ fnv1a64(stream)) + index);
}

inline Rng make_stream(std::uint64_t seed, std::string_view stream,
                       std::uint64_t index = 0) {
  return Rng(stream_seed(seed, stream, index));
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace nfvra
