#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pnsguard/photon_stats.hpp"
#include "pnsguard/pns_attack.hpp"
#include "pnsguard/random.hpp"

namespace pnsguard {

/// Histogram of photon numbers per pulse, n in {0..3}.
struct PhotonCounts {
  std::array<std::uint64_t, kNumBins> bins{};

  std::uint64_t total() const noexcept;
  friend bool operator==(const PhotonCounts&, const PhotonCounts&) = default;
};

struct SamplingPlan {
  std::uint64_t n_samples = 10'000'000;
  std::uint64_t n_runs = 100;
  std::uint64_t master_seed = 20240611;

  void validate() const;
};

/// Draws one photon number from `d` by inverse CDF.
class PhotonSampler {
 public:
  explicit PhotonSampler(const PhotonDistribution& d);

  std::uint8_t operator()(Rng& rng) const {
    const double u = uniform01(rng);
    std::uint8_t n = 0;
    while (n < kMaxPhotons && u >= cdf_[n]) ++n;
    return n;
  }

 private:
  std::array<double, kMaxPhotons> cdf_{};
};

PhotonCounts sample_counts(const PhotonDistribution& d, std::uint64_t n_samples,
                           std::uint64_t seed);

/// Per-pulse photon numbers, in emission order.
std::vector<std::uint8_t> sample_events(const PhotonDistribution& d, std::uint64_t n_samples,
                                        std::uint64_t seed);

PhotonCounts histogram(std::span<const std::uint8_t> events);

/// Per-event attack: with probability x a pulse loses exactly one photon.
/// Soft attacks act on pulses with n >= 2, hard attacks on every non-empty
/// pulse. No random numbers are consumed when the attack cannot act.
inline std::uint8_t attack_event(std::uint8_t n, const AttackSpec& a, Rng& rng) {
  const std::uint8_t min_photons = a.kind == AttackKind::Hard ? 1 : 2;
  if (a.kind == AttackKind::None || a.x <= 0.0 || n < min_photons) return n;
  return bernoulli(rng, a.x) ? static_cast<std::uint8_t>(n - 1) : n;
}

/// Binomial thinning of one pulse: each photon survives with probability eta.
inline std::uint8_t thin_event(std::uint8_t n, double eta, Rng& rng) {
  if (eta >= 1.0) return n;
  std::uint8_t kept = 0;
  for (std::uint8_t i = 0; i < n; ++i) kept += bernoulli(rng, eta) ? 1 : 0;
  return kept;
}

/// Thins every pulse of an event stream; pulse order and count are kept.
std::vector<std::uint8_t> apply_linear_loss(std::span<const std::uint8_t> events, double eta,
                                            std::uint64_t seed);

/// Thins every pulse represented by a histogram.
PhotonCounts apply_linear_loss(const PhotonCounts& counts, double eta, std::uint64_t seed);

struct Estimates {
  double mu = 0.0;
  double g2 = 0.0;
  double g3 = 0.0;
};

/// Plug-in estimators: sample factorial moments over powers of the sample
/// mean. Throws std::invalid_argument for an empty histogram and
/// DegenerateMean when the sample mean is zero.
Estimates estimate_stats(const PhotonCounts& counts);

/// Empirical photon-number frequencies.
std::array<double, kNumBins> frequencies(const PhotonCounts& counts);

/// One quantity aggregated over repeated runs. Runs that could not produce a
/// value (zero sample mean for g2/g3) stay in `per_run` as empty entries and
/// are excluded from the mean and standard deviation.
struct RunStatistics {
  std::string name;
  std::vector<std::optional<double>> per_run;
  double mean = 0.0;
  double stddev = 0.0;  ///< population standard deviation
  std::uint64_t n_runs = 0;
  std::uint64_t n_samples = 0;

  std::uint64_t n_valid() const;
  std::uint64_t n_excluded() const { return n_runs - n_valid(); }
  /// stddev / sqrt(n_valid)
  double standard_error() const;
};

RunStatistics summarize(std::string name, std::vector<std::optional<double>> per_run,
                        std::uint64_t n_samples);

/// Seed of run `run` within a plan.
std::uint64_t run_seed(std::uint64_t master_seed, std::uint64_t run);

/// Single run of the event pipeline: sample, attack, thin, histogram.
PhotonCounts simulate_run(const PhotonDistribution& d, const AttackSpec& attack, double eta,
                          std::uint64_t n_samples, std::uint64_t seed);

struct RepeatedRuns {
  RunStatistics mu;
  RunStatistics g2;
  RunStatistics g3;
  std::array<RunStatistics, kNumBins> p;
  std::string generator;
  std::uint64_t master_seed = 0;
};

/// Repeats the event pipeline plan.n_runs times with per-run seeds derived
/// from the master seed; runs may execute concurrently, results are keyed by
/// run index.
RepeatedRuns repeated_runs(const PhotonDistribution& d, const AttackSpec& attack, double eta,
                           const SamplingPlan& plan, unsigned threads = 0);

struct ConvergenceRow {
  std::uint64_t n_samples = 0;
  RunStatistics g2;
  double relative_deviation = 0.0;  ///< |mean g2 - reference| / reference
};

struct ConvergenceTable {
  double reference_g2 = 0.0;
  std::uint64_t reference_samples = 0;
  std::vector<ConvergenceRow> rows;
};

inline constexpr std::uint64_t kDefaultReferenceSamples = 100'000'000;

/// g2 estimates at each sample size, compared against one reference run at
/// `reference_samples`. Sizes must be ascending.
ConvergenceTable convergence_scan(const PhotonDistribution& d,
                                  std::span<const std::uint64_t> sizes, std::uint64_t n_runs,
                                  std::uint64_t master_seed,
                                  std::uint64_t reference_samples = kDefaultReferenceSamples,
                                  unsigned threads = 0);

}  // namespace pnsguard
