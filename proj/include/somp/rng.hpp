#pragma once

// Seed splitting. Every random component (sensing matrix, support, signs,
// noise, Monte-Carlo trials) draws from its own std::mt19937_64 whose seed is
// derived from a parent seed and a stream label:
//
//   derive_seed(parent, stream) = mix(parent + 0x9E3779B97F4A7C15 * (stream + 1))
//
// where mix is the SplitMix64 finaliser. Child streams are therefore
// reproducible in isolation and never share generator state.

#include "somp/types.hpp"

#include <cstdint>
#include <random>

namespace somp {

using Engine = std::mt19937_64;

enum class Stream : std::uint64_t {
  Matrix = 1,
  Support = 2,
  Signs = 3,
  Noise = 4,
  Trials = 5,
  Sampling = 6,
};

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr Seed derive_seed(Seed parent, std::uint64_t stream) noexcept {
  return splitmix64_mix(parent + 0x9E3779B97F4A7C15ULL * (stream + 1));
}

constexpr Seed derive_seed(Seed parent, Stream stream) noexcept {
  return derive_seed(parent, static_cast<std::uint64_t>(stream));
}

/// Seed of Monte-Carlo trial `index` under `master`.
constexpr Seed trial_seed(Seed master, std::uint64_t index) noexcept {
  return derive_seed(derive_seed(master, Stream::Trials), index);
}

}  // namespace somp
