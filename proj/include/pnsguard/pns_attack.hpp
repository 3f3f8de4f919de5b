#pragma once

#include <string_view>

#include "pnsguard/photon_stats.hpp"

namespace pnsguard {

enum class AttackKind { None, Soft, Hard };

std::string_view to_string(AttackKind kind);

/// Accepts "none", "soft", "hard". Throws std::invalid_argument otherwise.
AttackKind parse_attack_kind(std::string_view text);

/// Photon-number-splitting attack at strength x in [0, 1].
struct AttackSpec {
  AttackKind kind = AttackKind::None;
  double x = 0.0;

  /// Throws std::invalid_argument when x is outside [0, 1].
  void validate() const;

  /// Strength actually applied; a None attack always acts with x = 0.
  double effective_strength() const { return kind == AttackKind::None ? 0.0 : x; }
};

/// Redistributes probability weight as an eavesdropper splitting one photon
/// off a fraction x of pulses would:
///   soft: P1' = P1 + x P2, P2' = (1-x) P2 + x P3, P3' = (1-x) P3
///   hard: as soft, plus P0' = P0 + x P1 and P1' = (1-x) P1 + x P2
/// Under truncation P4 = 0, so a full attack empties P3.
PhotonDistribution apply_attack(const PhotonDistribution& d, const AttackSpec& a);

/// An attacked mean below this fraction of the original mean is treated as a
/// collapse: g2 of the attacked stream diverges and the point is reported as
/// degenerate rather than as a finite deviation.
inline constexpr double kMinMeanRetention = 0.02;

struct AttackSignature {
  double delta_g2 = 0.0;  ///< |g2' - g2|
  double delta_mu = 0.0;  ///< |mu' - mu|
};

/// Absolute change of exact g2 and mean caused by the attack.
///
/// Throws DegenerateMean when either mean is <= 1e-15, or when the attacked
/// mean retains less than `min_mean_retention` of the original mean.
AttackSignature attack_signature(const PhotonDistribution& d, const AttackSpec& a,
                                 double min_mean_retention = kMinMeanRetention);

}  // namespace pnsguard
