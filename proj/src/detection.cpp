#include "pnsguard/detection.hpp"

#include <cmath>
#include <stdexcept>

#include "pnsguard/errors.hpp"

namespace pnsguard {

DeviationVerdict detect_attack(double reference_g2, const RunStatistics& measured,
                               double threshold, double k_sigma) {
  if (!(reference_g2 > 0.0)) {
    throw DegenerateReference("reference_g2", "reference g2 must be positive");
  }
  if (measured.n_valid() == 0) {
    throw std::invalid_argument("detect_attack: measured statistics contain no valid run");
  }
  DeviationVerdict v;
  v.reference_g2 = reference_g2;
  v.measured_g2 = measured.mean;
  v.measured_std = measured.stddev;
  v.threshold = threshold;
  v.k_sigma = k_sigma;
  const double diff = std::abs(measured.mean - reference_g2);
  v.relative_deviation = diff / reference_g2;
  v.alarm = v.relative_deviation > threshold && diff > k_sigma * measured.stddev;
  return v;
}

double waiting_time(const LinkBudget& lb) {
  const double emission = 1.0 - std::exp(-lb.mu);
  const double transmission = std::pow(10.0, -lb.loss_db / 10.0);
  if (!(lb.repetition_rate > 0.0)) {
    throw InfeasibleLink("repetition_rate", "repetition rate must be positive");
  }
  if (!(emission > 0.0)) throw InfeasibleLink("mu", "mean photon number must be positive");
  if (!(lb.eta_det > 0.0)) {
    throw InfeasibleLink("eta_det", "detector efficiency must be positive");
  }
  if (!(transmission > 0.0)) throw InfeasibleLink("loss_db", "channel transmission is zero");
  return lb.n_required / (lb.repetition_rate * emission * transmission * lb.eta_det);
}

Feasibility satellite_feasible(const LinkBudget& lb, double flyover_s) {
  if (!(flyover_s > 0.0)) throw std::invalid_argument("flyover duration must be positive");
  Feasibility f;
  f.waiting_time_s = waiting_time(lb);
  f.margin_s = flyover_s - f.waiting_time_s;
  f.feasible = f.waiting_time_s < flyover_s;
  return f;
}

}  // namespace pnsguard
