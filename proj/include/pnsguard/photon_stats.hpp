#pragma once

#include <array>
#include <cstddef>

namespace pnsguard {

/// Largest photon number kept per pulse; P(n >= 4) is taken as zero.
inline constexpr std::size_t kMaxPhotons = 3;
inline constexpr std::size_t kNumBins = kMaxPhotons + 1;

/// Probabilities must sum to one within this absolute tolerance.
inline constexpr double kNormTolerance = 1e-12;

/// Means at or below this value make g2/g3 undefined.
inline constexpr double kMeanTolerance = 1e-15;

/// Measured characterization of a pulsed emitter.
struct SourceParams {
  double quantum_efficiency = 0.0;  ///< single-photon probability P1
  double g2 = 0.0;                  ///< g2(0)
  double g3 = 0.0;                  ///< g3(0,0)
  double repetition_rate = 25e6;    ///< Hz

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Photon-number distribution truncated at n = 3. The mean is always derived
/// from the stored probabilities.
class PhotonDistribution {
 public:
  using Probabilities = std::array<double, kNumBins>;

  /// Throws std::invalid_argument unless every entry lies in [0, 1] and the
  /// entries sum to 1 within kNormTolerance.
  static PhotonDistribution from_probabilities(const Probabilities& p);

  const Probabilities& probabilities() const noexcept { return p_; }
  double operator[](std::size_t n) const { return p_[n]; }
  double mean() const noexcept { return mu_; }

  friend bool operator==(const PhotonDistribution&, const PhotonDistribution&) = default;

 private:
  explicit PhotonDistribution(const Probabilities& p);

  Probabilities p_{};
  double mu_ = 0.0;
};

/// Builds P0..P3 from a source characterization. P1 is the quantum efficiency,
/// the multi-photon bounds P2 <= mu^2 g2 / 2 and P3 <= mu^3 g3 / 6 are
/// saturated, and the self-consistent mean
///   mu = P1 + mu^2 g2 + mu^3 g3 / 2
/// is found by fixed-point iteration from mu = P1.
///
/// Throws NonConvergent when the iteration does not settle within 1e4 steps
/// or leaves [0, 3], and InvalidDistribution when P0 would be negative.
PhotonDistribution build_distribution(const SourceParams& src);

/// Binomial thinning: every photon independently survives with probability
/// eta. Throws std::invalid_argument for eta outside [0, 1].
PhotonDistribution attenuate(const PhotonDistribution& d, double eta);

/// Raw first moment and second/third factorial moments.
struct FactorialMoments {
  double m1 = 0.0;   ///< <n>
  double m2f = 0.0;  ///< <n(n-1)>
  double m3f = 0.0;  ///< <n(n-1)(n-2)>
};

FactorialMoments moments(const PhotonDistribution& d);

/// <n(n-1)> / <n>^2. Throws DegenerateMean when the mean is <= 1e-15.
double g2_exact(const PhotonDistribution& d);

/// <n(n-1)(n-2)> / <n>^3. Throws DegenerateMean when the mean is <= 1e-15.
double g3_exact(const PhotonDistribution& d);

}  // namespace pnsguard
