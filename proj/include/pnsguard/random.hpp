#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace pnsguard {

/// Generator behind every Monte Carlo stream. Uniform variates are built
/// from raw 64-bit outputs so results do not depend on the standard
/// library's distribution implementations.
using Rng = std::mt19937_64;

inline constexpr std::string_view kGeneratorName =
    "mt19937_64 (seed_seq from splitmix64-derived stream seeds)";

/// Mixes a master seed with stream coordinates into an independent seed.
/// Distinct (stream, substream) pairs give unrelated seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t substream = 0) noexcept;

Rng make_rng(std::uint64_t seed);

/// Uniform double on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

/// Number of failures before the first success of a Bernoulli(p) sequence.
/// Returns UINT64_MAX when p == 0.
std::uint64_t geometric_gap(Rng& rng, double p);

}  // namespace pnsguard
