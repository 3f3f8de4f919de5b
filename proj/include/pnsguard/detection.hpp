#pragma once

#include <cstdint>

#include "pnsguard/sampling.hpp"

namespace pnsguard {

inline constexpr double kDefaultRelativeThreshold = 0.03;
inline constexpr double kDefaultKSigma = 3.0;

struct DeviationVerdict {
  double reference_g2 = 0.0;
  double measured_g2 = 0.0;
  double measured_std = 0.0;
  double relative_deviation = 0.0;
  double threshold = 0.0;
  double k_sigma = 0.0;
  bool alarm = false;
};

/// Flags a PNS attack when the monitored g2 moves away from the source's
/// reference value by more than `threshold` (relative) and by more than
/// k_sigma run-to-run standard deviations. Direction does not matter.
///
/// Throws DegenerateReference when reference_g2 <= 0 and
/// std::invalid_argument when `measured` has no valid run.
DeviationVerdict detect_attack(double reference_g2, const RunStatistics& measured,
                               double threshold = kDefaultRelativeThreshold,
                               double k_sigma = kDefaultKSigma);

/// Photons that must be detected before g2 is trusted.
inline constexpr double kDefaultRequiredPhotons = 1e5;

struct LinkBudget {
  double n_required = kDefaultRequiredPhotons;
  double repetition_rate = 100e6;  ///< Hz
  double mu = 0.0;
  double loss_db = 0.0;
  double eta_det = 0.9;
};

/// T = N / (f (1 - e^-mu) 10^(-loss/10) eta_det) in seconds.
/// Throws InfeasibleLink when any factor of the denominator is not positive.
double waiting_time(const LinkBudget& lb);

struct Feasibility {
  bool feasible = false;
  double waiting_time_s = 0.0;
  double margin_s = 0.0;  ///< flyover - waiting time
};

/// A pass is feasible only if the waiting time is strictly shorter than the
/// flyover. Throws std::invalid_argument for a non-positive flyover.
Feasibility satellite_feasible(const LinkBudget& lb, double flyover_s);

}  // namespace pnsguard
