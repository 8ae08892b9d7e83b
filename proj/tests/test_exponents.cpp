// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "doctest.h"
#include "extinctd/criteria.hpp"
#include "extinctd/exponents.hpp"
#include "extinctd/models.hpp"
#include "helpers.hpp"

using namespace extinctd;
using testutil::code_of;
using testutil::mat;

namespace {

Trajectory line(double slope, double intercept, std::size_t n) {
  Trajectory t(1);
  for (std::size_t k = 0; k < n; ++k) {
    const double time = 0.1 * static_cast<double>(k);
    const std::vector<double> x{intercept + slope * time};
    t.push(time, StateView{x, 0}, false);
  }
  return t;
}

// Trivial boundary dynamics with H fixed to theta.
std::pair<ModelSpec, Observable> constant_family(double theta) {
  ModelSpec m = make_brownian(1);
  return {m, [theta](const StateView&) { return theta; }};
}

}  // namespace

TEST_SUITE("exponents") {

TEST_CASE("replica summary") {
  const ExponentEstimate e = estimate_from_replicas({1.0, 2.0, 3.0}, 5.0, EstimateMethod::TrajectorySlope);
  CHECK(e.point == doctest::Approx(2.0));
  CHECK(e.ci_high - e.point == doctest::Approx(1.959963984540054 / std::sqrt(3.0)));
  CHECK(e.n_replicas == 3);
  CHECK(std::string(method_name(e.method)) == "trajectory_slope");
  CHECK(code_of([] { (void)estimate_from_replicas({}, 1.0, EstimateMethod::ClosedForm); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("slope of an exact line") {
  const Observable V = [](const StateView& s) { return s.x[0]; };
  const Trajectory t = line(-1.5, 4.0, 400);
  CHECK(trajectory_slope(t, V).point == doctest::Approx(-1.5));
  CHECK(trajectory_slope(t, V, 1.0).point == doctest::Approx(-1.5));
  CHECK(code_of([&] { (void)trajectory_slope(line(1.0, 0.0, 150), V); }) == ErrorCode::WindowTooShort);
  CHECK(code_of([&] { (void)trajectory_slope(t, V, 0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("boundary exponent is the minimum over initial conditions") {
  ModelSpec m = make_brownian(1);
  const Observable H = [](const StateView& s) { return s.x[0] > 0 ? 2.0 : 1.0; };
  SimConfig cfg;
  cfg.t_final = 1.0;
  cfg.dt = 1e-2;
  // Start far enough away that the sign never changes on [0, 1].
  const BoundaryExponentReport r =
      boundary_exponent(m, H, {StateVector{{50.0}, 0}, StateVector{{-50.0}, 0}}, cfg, 2);
  CHECK(r.per_ic.size() == 2);
  CHECK(r.argmin == 1);
  CHECK(r.estimate.point == doctest::Approx(1.0));
}

TEST_CASE("results do not depend on the thread count") {
  const ModelBundle b = make_linear_sde(mat({{0.2}}), mat({{1.0}}));
  SimConfig cfg;
  cfg.t_final = 5.0;
  cfg.dt = 1e-2;
  EstimatorOptions one;
  one.seed = 11;
  EstimatorOptions four = one;
  four.threads = 4;
  const std::vector<StateVector> ics{{{1.0}, 0}, {{2.0}, 0}};
  const SlopeReport a = slope_experiment(b.model, b.suite.V, ics, cfg, 7, one);
  const SlopeReport c = slope_experiment(b.model, b.suite.V, ics, cfg, 7, four);
  REQUIRE(a.outcomes.size() == 14);
  for (std::size_t k = 0; k < a.outcomes.size(); ++k) CHECK(a.outcomes[k].slope == c.outcomes[k].slope);
  CHECK(a.estimate.point == c.estimate.point);
}

TEST_CASE("floor-stopped paths count as extinct") {
  const ModelBundle b = make_linear_sde(mat({{-50}}), mat({{0}}));
  SimConfig cfg;
  cfg.t_final = 10.0;
  cfg.dt = 1e-3;
  cfg.floor_epsilon = 1e-10;
  const ExtinctionReport r = extinction_fraction(b.model, b.suite, {StateVector{{1.0}, 0}}, cfg, 3, 0.1);
  CHECK(r.fraction == 1.0);
  for (const ReplicaOutcome& o : r.slopes.outcomes) CHECK(o.stopped_at_floor);
}

TEST_CASE("robustness envelope") {
  SimConfig cfg;
  cfg.t_final = 1.0;
  cfg.dt = 0.01;
  const std::vector<StateVector> ics{{{0.0}, 0}};
  const ScanReport near = robustness_scan(constant_family, {1.0, 0.98, 0.5}, ics, cfg, 2);
  CHECK(near.nearest_drop == doctest::Approx(0.02));
  CHECK(near.envelope_ok);
  const ScanReport jump = robustness_scan(constant_family, {1.0, 0.7, 0.5}, ics, cfg, 2);
  CHECK(jump.nearest_drop == doctest::Approx(0.3));
  CHECK_FALSE(jump.envelope_ok);
  CHECK(code_of([&] { (void)robustness_scan(constant_family, {1.0}, ics, cfg, 1, {}, 3); }) ==
        ErrorCode::IndexOutOfRange);
}

TEST_CASE("linear exponent from the spectrum") {
  CHECK(linear_sde_exponent(mat({{-1, 0}, {0, -3}})) == doctest::Approx(1.0));
  CHECK(linear_sde_exponent(mat({{-0.5, 1}, {-1, -0.5}})) == doctest::Approx(0.5));
}

}
