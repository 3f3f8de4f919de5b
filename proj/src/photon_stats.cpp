#include "pnsguard/photon_stats.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pnsguard/errors.hpp"

namespace pnsguard {

namespace {

constexpr int kMaxIterations = 10000;
constexpr double kFixedPointTolerance = 1e-12;

bool is_probability(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

void SourceParams::validate() const {
  if (!is_probability(quantum_efficiency)) {
    throw std::invalid_argument("SourceParams.quantum_efficiency must lie in [0, 1]");
  }
  if (!(g2 >= 0.0) || !std::isfinite(g2)) {
    throw std::invalid_argument("SourceParams.g2 must be finite and >= 0");
  }
  if (!(g3 >= 0.0) || !std::isfinite(g3)) {
    throw std::invalid_argument("SourceParams.g3 must be finite and >= 0");
  }
  if (!(repetition_rate > 0.0) || !std::isfinite(repetition_rate)) {
    throw std::invalid_argument("SourceParams.repetition_rate must be > 0");
  }
}

PhotonDistribution::PhotonDistribution(const Probabilities& p) : p_(p) {
  for (std::size_t n = 1; n < kNumBins; ++n) {
    mu_ += static_cast<double>(n) * p_[n];
  }
}

PhotonDistribution PhotonDistribution::from_probabilities(const Probabilities& p) {
  double total = 0.0;
  for (std::size_t n = 0; n < kNumBins; ++n) {
    if (!is_probability(p[n])) {
      std::ostringstream msg;
      msg << "PhotonDistribution: P" << n << " = " << p[n] << " is not a probability";
      throw std::invalid_argument(msg.str());
    }
    total += p[n];
  }
  if (std::abs(total - 1.0) > kNormTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "PhotonDistribution: probabilities sum to " << total;
    throw std::invalid_argument(msg.str());
  }
  return PhotonDistribution(p);
}

PhotonDistribution build_distribution(const SourceParams& src) {
  src.validate();
  const double p1 = src.quantum_efficiency;

  double mu = p1;
  bool converged = false;
  for (int it = 0; it < kMaxIterations; ++it) {
    const double next = p1 + mu * mu * src.g2 + 0.5 * mu * mu * mu * src.g3;
    if (!std::isfinite(next) || next < 0.0 || next > static_cast<double>(kMaxPhotons)) {
      throw NonConvergent("mu", "mean photon number left [0, 3] during fixed-point iteration");
    }
    const double step = std::abs(next - mu);
    mu = next;
    if (step < kFixedPointTolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw NonConvergent("mu", "mean photon number fixed point did not converge in 10^4 iterations");
  }

  const double p2 = 0.5 * mu * mu * src.g2;
  const double p3 = mu * mu * mu * src.g3 / 6.0;
  const double p0 = 1.0 - p1 - p2 - p3;
  if (p0 < 0.0) {
    std::ostringstream msg;
    msg << "source parameters imply P0 = " << p0 << " < 0";
    throw InvalidDistribution("P0", msg.str());
  }
  return PhotonDistribution::from_probabilities({p0, p1, p2, p3});
}

PhotonDistribution attenuate(const PhotonDistribution& d, double eta) {
  if (!is_probability(eta)) throw std::invalid_argument("attenuate: eta must lie in [0, 1]");
  PhotonDistribution::Probabilities q{};
  for (std::size_t n = 0; n < kNumBins; ++n) {
    double binom = 1.0;  // C(n, k)
    for (std::size_t k = 0; k <= n; ++k) {
      q[k] += binom * std::pow(eta, static_cast<double>(k)) *
              std::pow(1.0 - eta, static_cast<double>(n - k)) * d[n];
      binom = binom * static_cast<double>(n - k) / static_cast<double>(k + 1);
    }
  }
  return PhotonDistribution::from_probabilities(q);
}

FactorialMoments moments(const PhotonDistribution& d) {
  return {
      .m1 = d[1] + 2.0 * d[2] + 3.0 * d[3],
      .m2f = 2.0 * d[2] + 6.0 * d[3],
      .m3f = 6.0 * d[3],
  };
}

double g2_exact(const PhotonDistribution& d) {
  const auto m = moments(d);
  if (m.m1 <= kMeanTolerance) {
    throw DegenerateMean("g2", "g2 undefined: mean photon number is zero");
  }
  return m.m2f / (m.m1 * m.m1);
}

double g3_exact(const PhotonDistribution& d) {
  const auto m = moments(d);
  if (m.m1 <= kMeanTolerance) {
    throw DegenerateMean("g3", "g3 undefined: mean photon number is zero");
  }
  return m.m3f / (m.m1 * m.m1 * m.m1);
}

}  // namespace pnsguard
