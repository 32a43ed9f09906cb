#pragma once

#include <cstdint>
#include <random>

#include "stablepoly/lattice.hpp"

namespace stablepoly {

/// Sequential stream used for jump sampling and Monte-Carlo paths.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer: a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of the independent stream `stream` below `base`.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return mix64(mix64(base) ^ mix64(stream ^ 0x6a09e667f3bcc909ULL));
}

inline Rng make_rng(std::uint64_t base, std::uint64_t stream) {
  return Rng(derive_seed(base, stream));
}

/// Part of the counter hash that depends on (seed, time) only.
constexpr std::uint64_t counter_prefix(std::uint64_t seed, std::int64_t time) {
  return mix64(mix64(seed ^ 0xd1b54a32d192ed03ULL) ^ static_cast<std::uint64_t>(time));
}

constexpr std::uint64_t counter_hash_at(std::uint64_t prefix, const Site& x, std::uint64_t lane = 0) {
  std::uint64_t h = mix64(prefix ^ static_cast<std::uint64_t>(x[0]));
  h = mix64(h ^ static_cast<std::uint64_t>(x[1]));
  h = mix64(h ^ static_cast<std::uint64_t>(x[2]));
  return mix64(h ^ lane);
}

/// Counter-based draw: a pure function of (seed, time, site, lane).
constexpr std::uint64_t counter_hash(std::uint64_t seed, std::int64_t time, const Site& x, std::uint64_t lane = 0) {
  return counter_hash_at(counter_prefix(seed, time), x, lane);
}

/// Uniform on the open interval (0, 1) with 53 random bits.
constexpr double to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace stablepoly
