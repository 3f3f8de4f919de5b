#include "pnsguard/hbt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pnsguard/errors.hpp"
#include "pnsguard/parallel.hpp"

namespace pnsguard {

namespace {

constexpr std::uint64_t kChunkPulses = std::uint64_t{1} << 22;
constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();

bool is_probability(double v) { return v >= 0.0 && v <= 1.0; }

/// Pulse index of the next dark click at or after `from`.
std::uint64_t next_dark(std::uint64_t from, double p, Rng& rng) {
  const std::uint64_t gap = geometric_gap(rng, p);
  return gap >= kNever - from ? kNever : from + gap;
}

/// Receiver pass over pulses [first, first + count). `photons_of(i, rng)`
/// yields the photon number of pulse i.
template <typename PhotonsOf>
std::vector<ClickRecord> detect(std::uint64_t first, std::uint64_t count,
                                const DetectorParams& det, Rng& photon_rng, Rng& dark_a,
                                Rng& dark_b, PhotonsOf&& photons_of) {
  std::vector<ClickRecord> out;
  std::uint64_t dark_next_a = next_dark(first, det.dark_click_prob, dark_a);
  std::uint64_t dark_next_b = next_dark(first, det.dark_click_prob, dark_b);
  const std::uint64_t end = first + count;
  for (std::uint64_t i = first; i < end; ++i) {
    const std::uint8_t n = photons_of(i, photon_rng);
    bool a = false;
    bool b = false;
    for (std::uint8_t k = 0; k < n; ++k) {
      const bool to_a = bernoulli(photon_rng, det.split_ratio);
      const bool seen = bernoulli(photon_rng, det.efficiency);
      if (seen) (to_a ? a : b) = true;
    }
    if (i == dark_next_a) {
      a = true;
      dark_next_a = next_dark(i + 1, det.dark_click_prob, dark_a);
    }
    if (i == dark_next_b) {
      b = true;
      dark_next_b = next_dark(i + 1, det.dark_click_prob, dark_b);
    }
    if (a || b) out.push_back({i, a, b});
  }
  return out;
}

}  // namespace

void DetectorParams::validate() const {
  if (!is_probability(efficiency)) {
    throw std::invalid_argument("DetectorParams.efficiency must lie in [0, 1]");
  }
  if (!is_probability(dark_click_prob)) {
    throw std::invalid_argument("DetectorParams.dark_click_prob must lie in [0, 1]");
  }
  if (!is_probability(split_ratio)) {
    throw std::invalid_argument("DetectorParams.split_ratio must lie in [0, 1]");
  }
}

PulseSource PulseSource::truncated(const PhotonDistribution& d) {
  return PulseSource(d, 0.0, false);
}

PulseSource PulseSource::poisson(double mean) {
  if (!(mean >= 0.0 && mean <= 50.0)) {
    throw std::invalid_argument("PulseSource::poisson: mean must lie in [0, 50]");
  }
  return PulseSource(PhotonDistribution::from_probabilities({1.0, 0.0, 0.0, 0.0}), mean, true);
}

std::uint8_t PulseSource::operator()(Rng& rng) const {
  if (!is_poisson_) return sampler_(rng);
  // Sequential inverse CDF; fine for the small means used here.
  const double u = uniform01(rng);
  double term = std::exp(-poisson_mean_);
  double cdf = term;
  std::uint8_t n = 0;
  while (u >= cdf && n < std::numeric_limits<std::uint8_t>::max()) {
    ++n;
    term *= poisson_mean_ / n;
    cdf += term;
    if (term == 0.0) break;
  }
  return n;
}

double PulseSource::g2() const { return is_poisson_ ? 1.0 : g2_exact(dist_); }

ClickStream simulate_hbt(std::span<const std::uint8_t> photons, const DetectorParams& det,
                         std::uint64_t seed) {
  det.validate();
  Rng photon_rng = make_rng(derive_seed(seed, 0, 0));
  Rng dark_a = make_rng(derive_seed(seed, 0, 1));
  Rng dark_b = make_rng(derive_seed(seed, 0, 2));
  ClickStream stream;
  stream.n_pulses = photons.size();
  stream.clicks = detect(0, photons.size(), det, photon_rng, dark_a, dark_b,
                         [&](std::uint64_t i, Rng&) { return photons[i]; });
  return stream;
}

ClickStream simulate_hbt(const PulseSource& source, std::uint64_t n_pulses,
                         const DetectorParams& det, std::uint64_t seed, unsigned threads) {
  det.validate();
  const std::uint64_t n_chunks = (n_pulses + kChunkPulses - 1) / kChunkPulses;
  std::vector<std::vector<ClickRecord>> parts(n_chunks);
  parallel_for(
      n_chunks,
      [&](std::size_t c) {
        const std::uint64_t first = c * kChunkPulses;
        const std::uint64_t count = std::min(kChunkPulses, n_pulses - first);
        Rng photon_rng = make_rng(derive_seed(seed, c, 0));
        Rng dark_a = make_rng(derive_seed(seed, c, 1));
        Rng dark_b = make_rng(derive_seed(seed, c, 2));
        parts[c] = detect(first, count, det, photon_rng, dark_a, dark_b,
                          [&](std::uint64_t, Rng& rng) { return source(rng); });
      },
      threads);

  ClickStream stream;
  stream.n_pulses = n_pulses;
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  stream.clicks.reserve(total);
  for (const auto& p : parts) stream.clicks.insert(stream.clicks.end(), p.begin(), p.end());
  return stream;
}

CoincidenceHistogram::CoincidenceHistogram(std::size_t max_lag, std::uint64_t n_pulses)
    : max_lag_(max_lag), n_pulses_(n_pulses), counts_(2 * max_lag + 1, 0) {}

std::uint64_t CoincidenceHistogram::count(std::int64_t lag) const {
  return counts_.at(static_cast<std::size_t>(lag + static_cast<std::int64_t>(max_lag_)));
}

void CoincidenceHistogram::add(std::int64_t lag, std::uint64_t n) {
  counts_.at(static_cast<std::size_t>(lag + static_cast<std::int64_t>(max_lag_))) += n;
}

double CoincidenceHistogram::rate(std::int64_t lag) const {
  const auto pairs = n_pulses_ - static_cast<std::uint64_t>(std::llabs(lag));
  return static_cast<double>(count(lag)) / static_cast<double>(pairs);
}

double CoincidenceHistogram::side_peak_mean() const {
  double sum = 0.0;
  const auto l = static_cast<std::int64_t>(max_lag_);
  for (std::int64_t k = 1; k <= l; ++k) sum += rate(k) + rate(-k);
  return sum / static_cast<double>(2 * max_lag_);
}

void CoincidenceHistogram::merge(const CoincidenceHistogram& other) {
  if (other.max_lag_ != max_lag_ || other.n_pulses_ != n_pulses_) {
    throw std::invalid_argument("CoincidenceHistogram::merge: mismatched histograms");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
}

CoincidenceHistogram coincidence_histogram(const ClickStream& stream, std::size_t max_lag,
                                           unsigned threads) {
  if (max_lag < 1) throw std::invalid_argument("coincidence_histogram: max_lag must be >= 1");
  if (stream.n_pulses < 2 * static_cast<std::uint64_t>(max_lag) + 1) {
    throw std::invalid_argument("coincidence_histogram: stream shorter than 2 max_lag + 1 pulses");
  }
  std::vector<std::uint64_t> a_idx;
  std::vector<std::uint64_t> b_idx;
  for (const auto& r : stream.clicks) {
    if (r.clicked_A) a_idx.push_back(r.pulse_index);
    if (r.clicked_B) b_idx.push_back(r.pulse_index);
  }

  const std::size_t n_blocks = std::max<std::size_t>(1, (a_idx.size() + 65535) / 65536);
  std::vector<CoincidenceHistogram> partial(n_blocks,
                                            CoincidenceHistogram(max_lag, stream.n_pulses));
  const auto lag = static_cast<std::uint64_t>(max_lag);
  parallel_for(
      n_blocks,
      [&](std::size_t blk) {
        const std::size_t begin = blk * 65536;
        const std::size_t end = std::min(a_idx.size(), begin + 65536);
        if (begin >= end) return;
        auto& h = partial[blk];
        const std::uint64_t lo_first = a_idx[begin] >= lag ? a_idx[begin] - lag : 0;
        auto lo = std::lower_bound(b_idx.begin(), b_idx.end(), lo_first);
        for (std::size_t j = begin; j < end; ++j) {
          const std::uint64_t i = a_idx[j];
          const std::uint64_t window_lo = i >= lag ? i - lag : 0;
          while (lo != b_idx.end() && *lo < window_lo) ++lo;
          for (auto it = lo; it != b_idx.end() && *it <= i + lag; ++it) {
            h.add(static_cast<std::int64_t>(*it) - static_cast<std::int64_t>(i));
          }
        }
      },
      threads);

  CoincidenceHistogram total(max_lag, stream.n_pulses);
  for (const auto& h : partial) total.merge(h);
  return total;
}

double g2_from_histogram(const CoincidenceHistogram& h) {
  const double side = h.side_peak_mean();
  if (side <= 0.0) {
    throw InsufficientCoincidences("g2", "no side-peak coincidences recorded");
  }
  return h.rate(0) / side;
}

double g2_from_clicks(const ClickStream& stream, std::size_t max_lag) {
  return g2_from_histogram(coincidence_histogram(stream, max_lag));
}

}  // namespace pnsguard
