#include "pnsguard/random.hpp"

#include <cmath>
#include <limits>

namespace pnsguard {

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t substream) noexcept {
  std::uint64_t s = splitmix64(master);
  s = splitmix64(s ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
  s = splitmix64(s ^ splitmix64(substream + 0x8CB92BA72F3D8DD7ULL));
  return s;
}

Rng make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return Rng(seq);
}

std::uint64_t geometric_gap(Rng& rng, double p) {
  if (p <= 0.0) return std::numeric_limits<std::uint64_t>::max();
  if (p >= 1.0) return 0;
  // 1 - u lies in (0, 1], so the log is finite.
  const double u = 1.0 - uniform01(rng);
  const double gap = std::floor(std::log(u) / std::log1p(-p));
  if (gap >= 1.8e19) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(gap);
}

}  // namespace pnsguard
