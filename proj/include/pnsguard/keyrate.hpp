#pragma once

#include <array>

#include "pnsguard/photon_stats.hpp"

namespace pnsguard {

/// Shannon binary entropy in bits, h2(0) = h2(1) = 0.
/// Throws DomainError outside [0, 1].
double binary_entropy(double x);

/// h2((1 + a) / 2). Throws DomainError for |a| > 1.
double phi(double a);

/// Holevo bound on Eve's information about an n-photon pulse prepared in
/// one of two states with overlap cos_c: h2((1 + cos_c^n) / 2).
double holevo_bound(int n, double cos_c);

enum class YieldModel {
  Approximate,  ///< Yn = Y0 + eta_n
  Exact,        ///< Yn = Y0 + eta_n - Y0 eta_n
};

struct ChannelParams {
  double loss_db = 0.0;
  double eta_det = 0.9;
  double dark_yield = 1e-6;       ///< Y0 per pulse
  double intrinsic_error = 0.03;  ///< e_int
  double baseline_error = 0.5;    ///< e0
  double ec_efficiency = 1.22;    ///< f
  YieldModel yield_model = YieldModel::Approximate;

  /// Channel transmission 10^(-loss_db / 10).
  double transmission() const;
  /// eta_tot = transmission * eta_det
  double total_efficiency() const;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Gains, yields and error rates per photon number plus both key rates.
struct RateBreakdown {
  std::array<double, kNumBins> yield{};
  std::array<double, kNumBins> gain{};
  std::array<double, kNumBins> error{};
  double q_mu = 0.0;
  double e_mu = 0.0;
  double omega = 0.0;
  double r_proposed = 0.0;
  double r_gllp = 0.0;
};

/// Fills yield, gain, error, q_mu and e_mu. Throws DegenerateGain when the
/// total gain is zero.
RateBreakdown yields_and_gains(const PhotonDistribution& d, const ChannelParams& ch);

/// Key rate per pulse when one- and two-photon pulses both contribute:
///   R = max(0, 1/2 [ -Q h2(E) f + Q1 (1 - phi(2 e1 - 1)) + Q2 (1 - phi((2 e2 - 1)^2)) ])
double rate_proposed(const RateBreakdown& gains, const ChannelParams& ch);
double rate_proposed(const PhotonDistribution& d, const ChannelParams& ch);

/// Untagged fraction 1 - P2 / Q, clamped to [0, 1].
double untagged_fraction(const PhotonDistribution& d, const RateBreakdown& gains);

/// GLLP key rate per pulse:
///   R = max(0, 1/2 [ -Q h2(E) f + Q omega (1 - h2(min(E / omega, 1/2))) ])
/// and zero whenever omega <= 0.
double rate_gllp(const PhotonDistribution& d, const RateBreakdown& gains,
                 const ChannelParams& ch);
double rate_gllp(const PhotonDistribution& d, const ChannelParams& ch);

/// Full breakdown including omega and both rates.
RateBreakdown evaluate_rates(const PhotonDistribution& d, const ChannelParams& ch);

}  // namespace pnsguard
