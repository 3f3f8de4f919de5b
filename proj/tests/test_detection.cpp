#include <cmath>

#include "doctest.h"
#include "pnsguard/detection.hpp"
#include "pnsguard/errors.hpp"
#include "support/oracle.hpp"
#include "support/presets.hpp"

using namespace pnsguard;

namespace {

RunStatistics runs_around(double mean, double half_width) {
  return summarize("g2", {mean - half_width, mean + half_width}, 1000);
}

}  // namespace

TEST_CASE("matching mean raises no alarm") {
  const auto v = detect_attack(0.5, runs_around(0.5, 0.01));
  CHECK_FALSE(v.alarm);
  CHECK(v.relative_deviation == 0.0);
}

TEST_CASE("soft attack on our-hBN raises an alarm") {
  const auto v = detect_attack(0.566, runs_around(0.287, 0.005));
  CHECK(v.alarm);
  CHECK(v.relative_deviation == doctest::Approx(0.49).epsilon(0.01));
}

TEST_CASE("small deviation with tight spread stays below threshold") {
  const auto v = detect_attack(0.5, runs_around(0.51, 1e-6));
  CHECK_FALSE(v.alarm);
}

TEST_CASE("large deviation with wide spread is not significant") {
  const auto v = detect_attack(0.5, runs_around(0.6, 0.1));
  CHECK(v.relative_deviation > v.threshold);
  CHECK_FALSE(v.alarm);
}

TEST_CASE("detection is symmetric in direction") {
  const auto up = detect_attack(0.5, runs_around(0.6, 0.001));
  const auto down = detect_attack(0.5, runs_around(0.4, 0.001));
  CHECK(up.alarm);
  CHECK(down.alarm);
  CHECK(up.relative_deviation == doctest::Approx(down.relative_deviation));
}

TEST_CASE("invalid detection inputs") {
  CHECK_THROWS_AS(detect_attack(0.0, runs_around(0.5, 0.1)), DegenerateReference);
  CHECK_THROWS_AS(detect_attack(0.5, summarize("g2", {std::nullopt}, 10)), std::invalid_argument);
}

TEST_CASE("waiting time for the Micius link") {
  LinkBudget lb;
  lb.mu = 0.037;
  lb.loss_db = 38;
  const double t = waiting_time(lb);
  CHECK(t == doctest::Approx(193.00361424258182).epsilon(1e-12));
  CHECK(t == doctest::Approx(oracle::waiting_time(1e5, 1e8, 0.037, 38, 0.9)).epsilon(1e-12));
  const auto f = satellite_feasible(lb, 273);
  CHECK(f.feasible);
  CHECK(f.margin_s == doctest::Approx(80).epsilon(0.01));

  lb.loss_db = 0;
  CHECK(waiting_time(lb) == doctest::Approx(0.030589011433345886).epsilon(1e-12));

  lb.loss_db = 60;
  CHECK(waiting_time(lb) == doctest::Approx(30589.01143334589).epsilon(1e-12));
  CHECK_FALSE(satellite_feasible(lb, 273).feasible);
}

TEST_CASE("saturated mean reaches the limiting waiting time") {
  LinkBudget lb;
  lb.mu = 50;
  CHECK(waiting_time(lb) == doctest::Approx(1e5 / (1e8 * 0.9)).epsilon(1e-12));
}

TEST_CASE("feasibility is strict at the boundary") {
  LinkBudget lb;
  lb.mu = 0.037;
  lb.loss_db = 38;
  const double t = waiting_time(lb);
  CHECK_FALSE(satellite_feasible(lb, t).feasible);
  CHECK(satellite_feasible(lb, std::nextafter(t, 1e9)).feasible);
  CHECK_THROWS_AS(satellite_feasible(lb, 0.0), std::invalid_argument);
}

TEST_CASE("degenerate link budgets are infeasible") {
  LinkBudget lb;
  lb.mu = 0.0;
  CHECK_THROWS_AS(waiting_time(lb), InfeasibleLink);
  lb.mu = 0.1;
  lb.eta_det = 0.0;
  CHECK_THROWS_AS(waiting_time(lb), InfeasibleLink);
  CHECK_THROWS_AS(satellite_feasible(lb, 273), InfeasibleLink);
}

TEST_CASE("property: waiting time monotonicity") {
  LinkBudget base;
  base.mu = 0.2;
  base.loss_db = 20;
  const double t0 = waiting_time(base);
  auto with = [&](auto change) {
    LinkBudget lb = base;
    change(lb);
    return waiting_time(lb);
  };
  CHECK(with([](LinkBudget& l) { l.loss_db += 1; }) > t0);
  CHECK(with([](LinkBudget& l) { l.repetition_rate *= 2; }) < t0);
  CHECK(with([](LinkBudget& l) { l.eta_det = 0.95; }) < t0);
  CHECK(with([](LinkBudget& l) { l.mu = 0.3; }) < t0);
}

TEST_CASE("false-alarm rate without attack stays below one percent") {
  // Reduced scale: 100 trials, each a 10-run monitor of 1e5 pulses.
  const auto d = build_distribution(fixtures::kHbnHigh);
  const double reference = g2_exact(d);
  int alarms = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    const auto runs = repeated_runs(d, {}, 1.0, {100'000, 10, derive_seed(2024, trial)}, 1);
    if (detect_attack(reference, runs.g2).alarm) ++alarms;
  }
  CHECK(alarms < 1);
}
