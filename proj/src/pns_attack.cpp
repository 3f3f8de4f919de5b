#include "pnsguard/pns_attack.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "pnsguard/errors.hpp"

namespace pnsguard {

std::string_view to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::None:
      return "none";
    case AttackKind::Soft:
      return "soft";
    case AttackKind::Hard:
      return "hard";
  }
  return "none";
}

AttackKind parse_attack_kind(std::string_view text) {
  if (text == "none") return AttackKind::None;
  if (text == "soft") return AttackKind::Soft;
  if (text == "hard") return AttackKind::Hard;
  throw std::invalid_argument("unknown attack kind '" + std::string(text) +
                              "' (expected none, soft or hard)");
}

void AttackSpec::validate() const {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument("AttackSpec.x must lie in [0, 1]");
  }
}

PhotonDistribution apply_attack(const PhotonDistribution& d, const AttackSpec& a) {
  a.validate();
  const double x = a.effective_strength();
  const auto& p = d.probabilities();

  PhotonDistribution::Probabilities q = p;
  switch (a.kind) {
    case AttackKind::None:
      return d;
    case AttackKind::Soft:
      q[0] = p[0];
      q[1] = p[1] + x * p[2];
      break;
    case AttackKind::Hard:
      q[0] = p[0] + x * p[1];
      q[1] = (1.0 - x) * p[1] + x * p[2];
      break;
  }
  q[2] = (1.0 - x) * p[2] + x * p[3];
  q[3] = (1.0 - x) * p[3];
  return PhotonDistribution::from_probabilities(q);
}

AttackSignature attack_signature(const PhotonDistribution& d, const AttackSpec& a,
                                 double min_mean_retention) {
  const PhotonDistribution attacked = apply_attack(d, a);
  const double g2_before = g2_exact(d);
  const double g2_after = g2_exact(attacked);
  if (attacked.mean() < min_mean_retention * d.mean()) {
    std::ostringstream msg;
    msg << "attacked mean photon number " << attacked.mean() << " retains less than "
        << min_mean_retention << " of " << d.mean() << "; g2 diverges";
    throw DegenerateMean("g2", msg.str());
  }
  return {
      .delta_g2 = std::abs(g2_after - g2_before),
      .delta_mu = std::abs(attacked.mean() - d.mean()),
  };
}

}  // namespace pnsguard
