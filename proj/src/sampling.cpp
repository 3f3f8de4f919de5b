#include "pnsguard/sampling.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "pnsguard/errors.hpp"
#include "pnsguard/parallel.hpp"

namespace pnsguard {

namespace {

constexpr std::uint64_t kReferenceStream = std::numeric_limits<std::uint64_t>::max();

void check_eta(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::invalid_argument("loss transmission eta must lie in [0, 1]");
  }
}

}  // namespace

std::uint64_t PhotonCounts::total() const noexcept {
  std::uint64_t t = 0;
  for (auto c : bins) t += c;
  return t;
}

void SamplingPlan::validate() const {
  if (n_samples < 1) throw std::invalid_argument("SamplingPlan.n_samples must be >= 1");
  if (n_runs < 1) throw std::invalid_argument("SamplingPlan.n_runs must be >= 1");
}

PhotonSampler::PhotonSampler(const PhotonDistribution& d) {
  double acc = 0.0;
  for (std::size_t n = 0; n < kMaxPhotons; ++n) {
    acc += d[n];
    cdf_[n] = acc;
  }
  // Bins above the last non-empty one must never be reached through rounding.
  std::size_t last = kMaxPhotons;
  while (last > 0 && d[last] == 0.0) --last;
  for (std::size_t n = last; n < kMaxPhotons; ++n) cdf_[n] = 2.0;
}

PhotonCounts sample_counts(const PhotonDistribution& d, std::uint64_t n_samples,
                           std::uint64_t seed) {
  PhotonSampler draw(d);
  Rng rng = make_rng(seed);
  PhotonCounts counts;
  for (std::uint64_t i = 0; i < n_samples; ++i) ++counts.bins[draw(rng)];
  return counts;
}

std::vector<std::uint8_t> sample_events(const PhotonDistribution& d, std::uint64_t n_samples,
                                        std::uint64_t seed) {
  PhotonSampler draw(d);
  Rng rng = make_rng(seed);
  std::vector<std::uint8_t> events(n_samples);
  for (auto& e : events) e = draw(rng);
  return events;
}

PhotonCounts histogram(std::span<const std::uint8_t> events) {
  PhotonCounts counts;
  for (auto n : events) {
    if (n > kMaxPhotons) throw std::invalid_argument("histogram: photon number above 3");
    ++counts.bins[n];
  }
  return counts;
}

std::vector<std::uint8_t> apply_linear_loss(std::span<const std::uint8_t> events, double eta,
                                            std::uint64_t seed) {
  check_eta(eta);
  Rng rng = make_rng(seed);
  std::vector<std::uint8_t> out(events.begin(), events.end());
  for (auto& n : out) n = thin_event(n, eta, rng);
  return out;
}

PhotonCounts apply_linear_loss(const PhotonCounts& counts, double eta, std::uint64_t seed) {
  check_eta(eta);
  Rng rng = make_rng(seed);
  PhotonCounts out;
  for (std::size_t n = 0; n < kNumBins; ++n) {
    for (std::uint64_t i = 0; i < counts.bins[n]; ++i) {
      ++out.bins[thin_event(static_cast<std::uint8_t>(n), eta, rng)];
    }
  }
  return out;
}

Estimates estimate_stats(const PhotonCounts& counts) {
  const std::uint64_t total = counts.total();
  if (total == 0) throw std::invalid_argument("estimate_stats: empty histogram");
  const auto& c = counts.bins;
  const double n = static_cast<double>(total);
  const double m1 = static_cast<double>(c[1] + 2 * c[2] + 3 * c[3]) / n;
  const double m2f = static_cast<double>(2 * c[2] + 6 * c[3]) / n;
  const double m3f = static_cast<double>(6 * c[3]) / n;
  if (m1 <= 0.0) throw DegenerateMean("g2", "sample mean photon number is zero");
  return {.mu = m1, .g2 = m2f / (m1 * m1), .g3 = m3f / (m1 * m1 * m1)};
}

std::array<double, kNumBins> frequencies(const PhotonCounts& counts) {
  const std::uint64_t total = counts.total();
  if (total == 0) throw std::invalid_argument("frequencies: empty histogram");
  std::array<double, kNumBins> f{};
  for (std::size_t n = 0; n < kNumBins; ++n) {
    f[n] = static_cast<double>(counts.bins[n]) / static_cast<double>(total);
  }
  return f;
}

std::uint64_t RunStatistics::n_valid() const {
  std::uint64_t v = 0;
  for (const auto& r : per_run) v += r.has_value() ? 1 : 0;
  return v;
}

double RunStatistics::standard_error() const {
  const auto v = n_valid();
  return v == 0 ? std::numeric_limits<double>::quiet_NaN()
                : stddev / std::sqrt(static_cast<double>(v));
}

RunStatistics summarize(std::string name, std::vector<std::optional<double>> per_run,
                        std::uint64_t n_samples) {
  RunStatistics s;
  s.name = std::move(name);
  s.n_runs = per_run.size();
  s.n_samples = n_samples;
  s.per_run = std::move(per_run);

  double sum = 0.0;
  std::uint64_t valid = 0;
  for (const auto& r : s.per_run) {
    if (r) {
      sum += *r;
      ++valid;
    }
  }
  if (valid == 0) {
    s.mean = s.stddev = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  s.mean = sum / static_cast<double>(valid);
  double ss = 0.0;
  for (const auto& r : s.per_run) {
    if (r) ss += (*r - s.mean) * (*r - s.mean);
  }
  s.stddev = std::sqrt(ss / static_cast<double>(valid));
  return s;
}

std::uint64_t run_seed(std::uint64_t master_seed, std::uint64_t run) {
  return derive_seed(master_seed, run, 0);
}

PhotonCounts simulate_run(const PhotonDistribution& d, const AttackSpec& attack, double eta,
                          std::uint64_t n_samples, std::uint64_t seed) {
  attack.validate();
  check_eta(eta);
  const PhotonSampler draw(d);
  Rng rng = make_rng(seed);
  PhotonCounts counts;
  const bool attacked = attack.effective_strength() > 0.0;
  const bool lossy = eta < 1.0;
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    std::uint8_t n = draw(rng);
    if (attacked) n = attack_event(n, attack, rng);
    if (lossy) n = thin_event(n, eta, rng);
    ++counts.bins[n];
  }
  return counts;
}

RepeatedRuns repeated_runs(const PhotonDistribution& d, const AttackSpec& attack, double eta,
                           const SamplingPlan& plan, unsigned threads) {
  plan.validate();
  attack.validate();
  check_eta(eta);

  std::vector<PhotonCounts> runs(plan.n_runs);
  parallel_for(
      plan.n_runs,
      [&](std::size_t r) {
        runs[r] = simulate_run(d, attack, eta, plan.n_samples, run_seed(plan.master_seed, r));
      },
      threads);

  std::vector<std::optional<double>> mu(plan.n_runs), g2(plan.n_runs), g3(plan.n_runs);
  std::array<std::vector<std::optional<double>>, kNumBins> p;
  for (auto& v : p) v.resize(plan.n_runs);
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto f = frequencies(runs[r]);
    for (std::size_t n = 0; n < kNumBins; ++n) p[n][r] = f[n];
    try {
      const auto est = estimate_stats(runs[r]);
      mu[r] = est.mu;
      g2[r] = est.g2;
      g3[r] = est.g3;
    } catch (const DegenerateMean&) {
      mu[r] = 0.0;
    }
  }

  RepeatedRuns out{
      .mu = summarize("mu", std::move(mu), plan.n_samples),
      .g2 = summarize("g2", std::move(g2), plan.n_samples),
      .g3 = summarize("g3", std::move(g3), plan.n_samples),
      .p = {},
      .generator = std::string(kGeneratorName),
      .master_seed = plan.master_seed,
  };
  for (std::size_t n = 0; n < kNumBins; ++n) {
    out.p[n] = summarize("P" + std::to_string(n), std::move(p[n]), plan.n_samples);
  }
  return out;
}

ConvergenceTable convergence_scan(const PhotonDistribution& d,
                                  std::span<const std::uint64_t> sizes, std::uint64_t n_runs,
                                  std::uint64_t master_seed, std::uint64_t reference_samples,
                                  unsigned threads) {
  if (sizes.empty()) throw std::invalid_argument("convergence_scan: no sample sizes");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1) throw std::invalid_argument("convergence_scan: sample size must be >= 1");
    if (i > 0 && sizes[i] <= sizes[i - 1]) {
      throw std::invalid_argument("convergence_scan: sample sizes must be ascending");
    }
  }
  if (n_runs < 1) throw std::invalid_argument("convergence_scan: n_runs must be >= 1");

  ConvergenceTable table;
  table.reference_samples = reference_samples;
  table.reference_g2 =
      estimate_stats(sample_counts(d, reference_samples,
                                   derive_seed(master_seed, 0, kReferenceStream)))
          .g2;

  // Flatten (size, run) pairs so one parallel pass covers the whole table.
  const std::size_t jobs = sizes.size() * n_runs;
  std::vector<std::optional<double>> g2(jobs);
  parallel_for(
      jobs,
      [&](std::size_t job) {
        const std::size_t s = job / n_runs;
        const std::size_t r = job % n_runs;
        const auto counts = sample_counts(d, sizes[s], derive_seed(master_seed, r, s + 1));
        try {
          g2[job] = estimate_stats(counts).g2;
        } catch (const DegenerateMean&) {
          g2[job].reset();
        }
      },
      threads);

  for (std::size_t s = 0; s < sizes.size(); ++s) {
    std::vector<std::optional<double>> runs(g2.begin() + s * n_runs,
                                            g2.begin() + (s + 1) * n_runs);
    ConvergenceRow row{.n_samples = sizes[s], .g2 = summarize("g2", std::move(runs), sizes[s])};
    row.relative_deviation = std::abs(row.g2.mean - table.reference_g2) / table.reference_g2;
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace pnsguard
