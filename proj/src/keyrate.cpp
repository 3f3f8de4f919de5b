#include "pnsguard/keyrate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pnsguard/errors.hpp"

namespace pnsguard {

namespace {

bool is_probability(double v) { return v >= 0.0 && v <= 1.0; }

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

double binary_entropy(double x) {
  if (!is_probability(x)) throw DomainError("h2", "binary entropy argument outside [0, 1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double phi(double a) {
  if (!(a >= -1.0 && a <= 1.0)) throw DomainError("phi", "phi argument outside [-1, 1]");
  return binary_entropy(clamp01(0.5 + 0.5 * a));
}

double holevo_bound(int n, double cos_c) {
  if (n < 1) throw DomainError("holevo", "photon number must be >= 1");
  if (!is_probability(cos_c)) throw DomainError("holevo", "state overlap outside [0, 1]");
  return binary_entropy(clamp01(0.5 * (1.0 + std::pow(cos_c, n))));
}

double ChannelParams::transmission() const { return std::pow(10.0, -loss_db / 10.0); }

double ChannelParams::total_efficiency() const { return transmission() * eta_det; }

void ChannelParams::validate() const {
  if (!(loss_db >= 0.0) || !std::isfinite(loss_db)) {
    throw std::invalid_argument("ChannelParams.loss_db must be finite and >= 0");
  }
  if (!is_probability(eta_det)) throw std::invalid_argument("ChannelParams.eta_det must lie in [0, 1]");
  if (!is_probability(dark_yield)) {
    throw std::invalid_argument("ChannelParams.dark_yield must lie in [0, 1]");
  }
  if (!is_probability(intrinsic_error)) {
    throw std::invalid_argument("ChannelParams.intrinsic_error must lie in [0, 1]");
  }
  if (!is_probability(baseline_error)) {
    throw std::invalid_argument("ChannelParams.baseline_error must lie in [0, 1]");
  }
  if (!(ec_efficiency >= 1.0) || !std::isfinite(ec_efficiency)) {
    throw std::invalid_argument("ChannelParams.ec_efficiency must be >= 1");
  }
}

RateBreakdown yields_and_gains(const PhotonDistribution& d, const ChannelParams& ch) {
  ch.validate();
  const double eta = ch.total_efficiency();
  const double y0 = ch.dark_yield;

  RateBreakdown b;
  double error_weight = 0.0;
  for (std::size_t n = 0; n < kNumBins; ++n) {
    const double eta_n = 1.0 - std::pow(1.0 - eta, static_cast<double>(n));
    double y = y0 + eta_n;
    if (ch.yield_model == YieldModel::Exact) y -= y0 * eta_n;
    b.yield[n] = y;
    b.gain[n] = y * d[n];
    b.error[n] = y > 0.0 ? (ch.baseline_error * y0 + ch.intrinsic_error * eta_n) / y
                         : ch.baseline_error;
    b.q_mu += b.gain[n];
    error_weight += b.error[n] * b.yield[n] * d[n];
  }
  if (!(b.q_mu > 0.0)) throw DegenerateGain("Q_mu", "total gain is zero");
  b.e_mu = error_weight / b.q_mu;
  return b;
}

double rate_proposed(const RateBreakdown& g, const ChannelParams& ch) {
  const double ec_cost = g.q_mu * binary_entropy(clamp01(g.e_mu)) * ch.ec_efficiency;
  const double e1 = clamp01(g.error[1]);
  const double e2 = clamp01(g.error[2]);
  const double single = g.gain[1] * (1.0 - phi(2.0 * e1 - 1.0));
  const double a2 = 2.0 * e2 - 1.0;
  const double pair = g.gain[2] * (1.0 - phi(a2 * a2));
  return std::max(0.0, 0.5 * (-ec_cost + single + pair));
}

double rate_proposed(const PhotonDistribution& d, const ChannelParams& ch) {
  return rate_proposed(yields_and_gains(d, ch), ch);
}

double untagged_fraction(const PhotonDistribution& d, const RateBreakdown& g) {
  return clamp01(1.0 - d[2] / g.q_mu);
}

double rate_gllp(const PhotonDistribution& d, const RateBreakdown& g, const ChannelParams& ch) {
  const double omega = untagged_fraction(d, g);
  if (omega <= 0.0) return 0.0;
  const double ec_cost = g.q_mu * binary_entropy(clamp01(g.e_mu)) * ch.ec_efficiency;
  const double untagged_error = std::min(g.e_mu / omega, 0.5);
  const double privacy = g.q_mu * omega * (1.0 - binary_entropy(untagged_error));
  return std::max(0.0, 0.5 * (-ec_cost + privacy));
}

double rate_gllp(const PhotonDistribution& d, const ChannelParams& ch) {
  return rate_gllp(d, yields_and_gains(d, ch), ch);
}

RateBreakdown evaluate_rates(const PhotonDistribution& d, const ChannelParams& ch) {
  RateBreakdown b = yields_and_gains(d, ch);
  b.omega = untagged_fraction(d, b);
  b.r_proposed = rate_proposed(b, ch);
  b.r_gllp = rate_gllp(d, b, ch);
  return b;
}

}  // namespace pnsguard
