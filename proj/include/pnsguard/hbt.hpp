#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pnsguard/photon_stats.hpp"
#include "pnsguard/random.hpp"
#include "pnsguard/sampling.hpp"

namespace pnsguard {

/// Receiver model: a beam splitter feeding two threshold detectors A and B.
struct DetectorParams {
  double efficiency = 0.1;         ///< per-photon detection probability
  double dark_click_prob = 1e-6;   ///< per detector, per pulse window
  double split_ratio = 0.5;        ///< probability a photon is routed to A

  void validate() const;
};

struct ClickRecord {
  std::uint64_t pulse_index = 0;
  bool clicked_A = false;
  bool clicked_B = false;

  friend bool operator==(const ClickRecord&, const ClickRecord&) = default;
};

/// Detector output over `n_pulses` consecutive pulse windows. Only windows
/// with at least one click are stored, in ascending pulse order.
struct ClickStream {
  std::uint64_t n_pulses = 0;
  std::vector<ClickRecord> clicks;

  friend bool operator==(const ClickStream&, const ClickStream&) = default;
};

/// Photon numbers per pulse for long detector simulations: either a
/// truncated source distribution or a Poissonian (coherent) control.
class PulseSource {
 public:
  static PulseSource truncated(const PhotonDistribution& d);
  static PulseSource poisson(double mean);

  std::uint8_t operator()(Rng& rng) const;
  /// Exact g2 of the emitted photon-number distribution.
  double g2() const;

 private:
  PulseSource(const PhotonDistribution& d, double poisson_mean, bool is_poisson)
      : sampler_(d), dist_(d), poisson_mean_(poisson_mean), is_poisson_(is_poisson) {}

  PhotonSampler sampler_;
  PhotonDistribution dist_;
  double poisson_mean_ = 0.0;
  bool is_poisson_ = false;
};

/// Routes each photon of each pulse through the receiver. A detector clicks
/// when at least one photon routed to it is detected or a dark click occurs.
/// `photons[i]` is the photon number of pulse i.
ClickStream simulate_hbt(std::span<const std::uint8_t> photons, const DetectorParams& det,
                         std::uint64_t seed);

/// Same receiver fed directly from a source; the stream is generated in
/// independently seeded chunks that may run concurrently.
ClickStream simulate_hbt(const PulseSource& source, std::uint64_t n_pulses,
                         const DetectorParams& det, std::uint64_t seed, unsigned threads = 0);

/// Coincidence counts C(k): pulses with a click on A at i and on B at i + k,
/// for -max_lag <= k <= max_lag.
class CoincidenceHistogram {
 public:
  CoincidenceHistogram(std::size_t max_lag, std::uint64_t n_pulses);

  std::size_t max_lag() const noexcept { return max_lag_; }
  std::uint64_t n_pulses() const noexcept { return n_pulses_; }

  std::uint64_t count(std::int64_t lag) const;
  void add(std::int64_t lag, std::uint64_t n = 1);
  /// Counts per available pulse pair, C(k) / (n_pulses - |k|).
  double rate(std::int64_t lag) const;
  /// Mean side-peak rate over 1 <= |k| <= max_lag.
  double side_peak_mean() const;

  /// Adds another histogram over the same lag range and pulse span.
  void merge(const CoincidenceHistogram& other);

 private:
  std::size_t max_lag_;
  std::uint64_t n_pulses_;
  std::vector<std::uint64_t> counts_;
};

inline constexpr std::size_t kDefaultMaxLag = 500;

/// Throws std::invalid_argument when the stream spans fewer than
/// 2 max_lag + 1 pulses.
CoincidenceHistogram coincidence_histogram(const ClickStream& stream,
                                           std::size_t max_lag = kDefaultMaxLag,
                                           unsigned threads = 0);

/// g2(0) = C(0) / mean side peak, both as per-pair rates.
/// Throws InsufficientCoincidences when every side peak is empty.
double g2_from_histogram(const CoincidenceHistogram& h);

double g2_from_clicks(const ClickStream& stream, std::size_t max_lag = kDefaultMaxLag);

}  // namespace pnsguard
