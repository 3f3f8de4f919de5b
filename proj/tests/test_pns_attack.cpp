#include <random>

#include "doctest.h"
#include "pnsguard/errors.hpp"
#include "pnsguard/pns_attack.hpp"
#include "support/oracle.hpp"
#include "support/presets.hpp"

using namespace pnsguard;

namespace {

const SourceParams kSources[] = {fixtures::kOurHbn, fixtures::kHbnHigh, fixtures::kQd};

int min_photons(AttackKind k) { return k == AttackKind::Hard ? 1 : 2; }

}  // namespace

TEST_CASE("attack kinds parse and print") {
  CHECK(parse_attack_kind("soft") == AttackKind::Soft);
  CHECK(parse_attack_kind("hard") == AttackKind::Hard);
  CHECK(parse_attack_kind("none") == AttackKind::None);
  CHECK_THROWS_AS(parse_attack_kind("medium"), std::invalid_argument);
  CHECK(to_string(AttackKind::Hard) == "hard");
}

TEST_CASE("attack strength outside [0, 1] is rejected") {
  CHECK_THROWS_AS((AttackSpec{AttackKind::Soft, 1.5}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((AttackSpec{AttackKind::Hard, -0.1}.validate()), std::invalid_argument);
  const auto d = build_distribution(fixtures::kOurHbn);
  CHECK_THROWS_AS(apply_attack(d, {AttackKind::Soft, 1.5}), std::invalid_argument);
}

TEST_CASE("zero strength leaves the distribution unchanged") {
  for (const auto& src : kSources) {
    const auto d = build_distribution(src);
    CHECK(apply_attack(d, {AttackKind::Soft, 0.0}) == d);
    CHECK(apply_attack(d, {AttackKind::Hard, 0.0}) == d);
    CHECK(apply_attack(d, {AttackKind::None, 0.7}) == d);
    const auto s = attack_signature(d, {AttackKind::Hard, 0.0});
    CHECK(s.delta_g2 == 0.0);
    CHECK(s.delta_mu == 0.0);
  }
}

TEST_CASE("full soft attack empties P3") {
  const auto d = build_distribution(fixtures::kOurHbn);
  const auto a = apply_attack(d, {AttackKind::Soft, 1.0});
  CHECK(a[3] == 0.0);
  CHECK(a[2] == d[3]);
}

TEST_CASE("full hard attack on the high-efficiency source") {
  const auto d = build_distribution(fixtures::kHbnHigh);
  const auto a = apply_attack(d, {AttackKind::Hard, 1.0});
  CHECK(a[0] == doctest::Approx(0.8413148291776392).epsilon(1e-12));
  CHECK(a[1] == doctest::Approx(0.14668098474469332).epsilon(1e-12));
  CHECK(a[2] == doctest::Approx(0.012004186077667421).epsilon(1e-12));
  CHECK(a[3] == 0.0);
}

TEST_CASE("transforms agree with the per-pulse transition oracle") {
  for (const auto& src : kSources) {
    const auto d = build_distribution(src);
    for (auto kind : {AttackKind::Soft, AttackKind::Hard}) {
      for (double x : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
        const auto a = apply_attack(d, {kind, x});
        const auto o = oracle::attack(d.probabilities(), x, min_photons(kind));
        for (std::size_t n = 0; n < kNumBins; ++n) CHECK(a[n] == doctest::Approx(o[n]).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("signature values frozen from the analytic oracle") {
  const auto our = build_distribution(fixtures::kOurHbn);
  const double soft[] = {0, 0.13867, 0.27881, 0.42042, 0.56352};
  const double hard[] = {0, 0.1844, 0.54706, 1.5879};
  for (int i = 0; i < 5; ++i) {
    const double x = 0.25 * i;
    CHECK(attack_signature(our, {AttackKind::Soft, x}).delta_g2 ==
          doctest::Approx(soft[i]).epsilon(2e-4));
    if (i < 4)
      CHECK(attack_signature(our, {AttackKind::Hard, x}).delta_g2 ==
            doctest::Approx(hard[i]).epsilon(2e-4));
  }

  // soft x = 0.5: attacked g2 ~ 0.287 against 0.566
  const auto half = apply_attack(our, {AttackKind::Soft, 0.5});
  CHECK(g2_exact(half) == doctest::Approx(0.287051130517554).epsilon(1e-10));

  const auto high = build_distribution(fixtures::kHbnHigh);
  const double hs[] = {0, 0.05063, 0.10988, 0.17935, 0.26099};
  const double hh[] = {0, 0.06731, 0.17431, 0.36291, 0.53757};
  for (int i = 0; i < 5; ++i) {
    CHECK(attack_signature(high, {AttackKind::Soft, 0.25 * i}).delta_g2 ==
          doctest::Approx(hs[i]).epsilon(1e-4));
    CHECK(attack_signature(high, {AttackKind::Hard, 0.25 * i}).delta_g2 ==
          doctest::Approx(hh[i]).epsilon(1e-4));
  }
}

TEST_CASE("soft mean shift is linear with slope P2 + P3") {
  const auto d = build_distribution(fixtures::kHbnHigh);
  const double slope = d[2] + d[3];
  CHECK(slope == doctest::Approx(0.159).epsilon(0.01));
  for (double x : {0.1, 0.3, 0.6, 1.0})
    CHECK(attack_signature(d, {AttackKind::Soft, x}).delta_mu == doctest::Approx(x * slope));
}

TEST_CASE("collapsed mean under a full hard attack is reported") {
  const auto d = build_distribution(fixtures::kOurHbn);
  CHECK_THROWS_AS(attack_signature(d, {AttackKind::Hard, 1.0}), DegenerateMean);
  // The other presets keep enough signal to be plotted.
  CHECK_NOTHROW(attack_signature(build_distribution(fixtures::kQd), {AttackKind::Hard, 1.0}));
  CHECK_NOTHROW(attack_signature(build_distribution(fixtures::kHbnHigh), {AttackKind::Hard, 1.0}));
}

TEST_CASE("property: attacks conserve probability and weaken the stream") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    double w[4] = {u(rng), u(rng), u(rng), u(rng)};
    const double s = w[0] + w[1] + w[2] + w[3];
    const auto d = PhotonDistribution::from_probabilities(
        {w[0] / s, w[1] / s, w[2] / s, 1.0 - (w[0] + w[1] + w[2]) / s});
    double last_soft_mu = d.mean() + 1;
    double last_soft_p3 = 2;
    double last_hard_mu = d.mean() + 1;
    for (double x = 0; x <= 1.0 + 1e-12; x += 0.1) {
      const auto so = apply_attack(d, {AttackKind::Soft, std::min(x, 1.0)});
      const auto ha = apply_attack(d, {AttackKind::Hard, std::min(x, 1.0)});
      double ss = 0, sh = 0;
      for (std::size_t n = 0; n < kNumBins; ++n) {
        ss += so[n];
        sh += ha[n];
      }
      REQUIRE(std::abs(ss - 1.0) < 1e-12);
      REQUIRE(std::abs(sh - 1.0) < 1e-12);
      REQUIRE(so.mean() <= last_soft_mu + 1e-15);
      REQUIRE(so[3] <= last_soft_p3 + 1e-15);
      REQUIRE(ha.mean() <= last_hard_mu + 1e-15);
      REQUIRE(ha.mean() <= so.mean() + 1e-15);
      last_soft_mu = so.mean();
      last_soft_p3 = so[3];
      last_hard_mu = ha.mean();
    }
    REQUIRE(apply_attack(d, {AttackKind::Soft, 1.0})[3] == 0.0);
  }
}
