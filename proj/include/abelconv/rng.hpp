#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace abelconv {

// Random streams.
//
// Every stochastic object is drawn from a std::mt19937_64 whose seed is
// derived from a parent seed by `derive_seed(parent, tag, index)`:
//
//   h     = splitmix64(parent ^ fnv1a64(tag))
//   child = splitmix64(h + 0x9E3779B97F4A7C15 * (index + 1))
//
// Layers use tag "layer" with their 0-based position, offsets of one layer
// use "offsets", the weight matrix of offset i uses ("weights", i), the
// readout uses "readout", and trial k of an experiment uses (experiment, k).
// Streams are therefore independent of the order in which they are consumed.
using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view text) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const char ch : text) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001B3ULL;
  }
  return h;
}

constexpr std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag,
                                    std::uint64_t index = 0) noexcept {
  const std::uint64_t h = splitmix64(parent ^ fnv1a64(tag));
  return splitmix64(h + 0x9E3779B97F4A7C15ULL * (index + 1));
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace abelconv
