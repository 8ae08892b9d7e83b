// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "doctest.h"
#include "extinctd/lyapunov.hpp"
#include "extinctd/models.hpp"
#include "helpers.hpp"

using namespace extinctd;
using testutil::code_of;
using testutil::mat;

TEST_SUITE("lyapunov") {

TEST_CASE("generator of x^2 under Brownian motion and OU") {
  const Observable f = [](const StateView& s) { return s.x[0] * s.x[0]; };
  const std::vector<double> x{0.5};
  const GeneratorValue bm = apply_generator(make_brownian(1), f, StateView{x, 0});
  CHECK(bm.Lf == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(bm.gamma == doctest::Approx(1.0).epsilon(1e-5));  // |2x|^2
  const GeneratorValue ou = apply_generator(make_ou(1.0, 1.0), f, StateView{x, 0});
  CHECK(ou.Lf == doctest::Approx(-2.0 * 0.25 + 1.0).epsilon(1e-5));
}

TEST_CASE("switching term enters the generator") {
  SisParams p;
  p.adjacency = {mat({{0, 1}, {1, 0}})};
  p.beta = {0.3, 1.5};
  p.delta = {1.0, 1.0};
  p.kappa = {0.0};
  p.Q = mat({{-1, 1}, {2, -2}});
  const ModelBundle b = make_sis(p);
  const Observable by_regime = [](const StateView& s) { return s.regime == 0 ? 0.0 : 1.0; };
  const std::vector<double> x{0.4, 0.3};
  CHECK(apply_generator(b.model, by_regime, StateView{x, 0}).Lf == doctest::Approx(1.0));
  CHECK(apply_generator(b.model, by_regime, StateView{x, 1}).Lf == doctest::Approx(-2.0));
}

TEST_CASE("suite LV agrees with the numerical generator") {
  SisParams p;
  p.adjacency = {mat({{0, 1, 0}, {1, 0, 1}, {0, 1, 0}})};
  p.beta = {0.4};
  p.delta = {1.0};
  p.kappa = {0.3};
  p.Q = mat({{0}});
  const ModelBundle sis = make_sis(p);
  const ModelBundle lin = make_linear_sde(mat({{-1, 0.5}, {0.2, -2}}), mat({{0.3, 0}, {0, 0.4}}));
  for (const ModelBundle* b : {&sis, &lin}) {
    for (const std::vector<double>& x : {std::vector<double>(b->model.dim, 0.2), std::vector<double>(b->model.dim, 0.05)}) {
      const StateView s{x, 0};
      const double num = apply_generator(b->model, b->suite.V, s).Lf;
      CHECK(b->suite.LV(s) == doctest::Approx(num).epsilon(1e-4));
    }
  }
}

TEST_CASE("generator stays accurate close to the extinction set") {
  LorenzParams lp;
  lp.alpha0 = 0.05;
  const ModelBundle b = make_lorenz(lp);
  for (double R : {1.0, 1e-4, 1e-9}) {
    const std::vector<double> x{0.6 * R, 0.2 * R, 0.7};
    const StateView s{x, 0};
    CHECK(apply_generator(b.model, b.suite.V, s).Lf == doctest::Approx(b.suite.LV(s)).epsilon(1e-5));
  }
}

TEST_CASE("dynkin residual vanishes for a deterministic path") {
  const ModelBundle b = make_linear_sde(mat({{-1}}), mat({{0}}));
  SimConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_final = 2.0;
  RngStream rng(1, 0);
  const Trajectory p = simulate(b.model, StateVector{{1.0}, 0}, cfg, rng);
  const Observable f = [](const StateView& s) { return s.x[0]; };
  const Observable Lf = [](const StateView& s) { return -s.x[0]; };
  const std::vector<double> m = dynkin_residual(p, f, Lf);
  REQUIRE(m.size() == p.size());
  CHECK(m.front() == 0.0);
  for (double v : m) CHECK(std::abs(v) < 1e-4);
}

TEST_CASE("occupation averages") {
  Trajectory t(1);
  const std::vector<double> a{1.0}, b{3.0};
  t.push(0.0, StateView{a, 0}, false);
  t.push(1.0, StateView{a, 0}, false);
  t.push(2.0, StateView{b, 1}, true);
  t.push(4.0, StateView{b, 1}, false);
  const Observable one = [](const StateView&) { return 1.0; };
  const Observable in_zero = [](const StateView& s) { return s.regime == 0 ? 1.0 : 0.0; };
  CHECK(occupation_average(t, one, 0.0) == doctest::Approx(1.0));
  CHECK(code_of([&] { (void)occupation_average(t, one, 4.0); }) == ErrorCode::EmptyWindow);
  const std::vector<double> integ = running_integral(t, one);
  CHECK(integ.back() == doctest::Approx(4.0));
  // Piecewise constant between jumps: regime 0 holds on [0, 2).
  CHECK(occupation_average(t, in_zero, 0.0) == doctest::Approx(0.5));
}

TEST_CASE("accumulator rules") {
  OccupationAccumulator acc;
  acc.add("one", [](const StateView&) { return 1.0; });
  const std::vector<double> x{0.0};
  acc.observe(0.0, StateView{x, 0}, false);
  CHECK(code_of([&] { acc.add("late", [](const StateView&) { return 0.0; }); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { (void)acc.average(0); }) == ErrorCode::EmptyWindow);
  acc.observe(2.0, StateView{x, 0}, false);
  CHECK(acc.average(0) == doctest::Approx(1.0));
  CHECK(code_of([&] { acc.observe(1.0, StateView{x, 0}, false); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("tightness of OU occupation measures") {
  LyapunovSuite s;
  s.W = s.Wprime = [](const StateView& v) { return 1.0 + v.x[0] * v.x[0]; };
  s.K = 3.0;
  SimConfig cfg;
  cfg.dt = 1e-2;
  cfg.t_final = 200;
  RngStream rng(2, 0);
  const Trajectory p = simulate(make_ou(1.0, 1.0), StateVector{{0.0}, 0}, cfg, rng);
  const TightnessReport ok = tightness_check(p, s);
  CHECK_FALSE(ok.violated);
  s.K = 1.2;  // below the stationary mean 1.5
  CHECK(tightness_check(p, s).violated);
}

TEST_CASE("suite inequalities hold for bundled models") {
  const ModelBundle lin = make_linear_sde(mat({{-1, 0.5}, {0.2, -2}}), mat({{0.3, 0}, {0, 0.4}}));
  std::vector<StateVector> pts;
  RngStream rng(3, 0);
  for (int k = 0; k < 50; ++k) pts.push_back({{rng.normal(), rng.normal()}, 0});
  const DiagnosticsReport r = suite_diagnostics(lin.model, lin.suite, pts);
  CHECK(r.points == pts.size());
  CHECK(r.passed);

  KolmogorovParams kp;
  kp.r = {0.05};
  kp.B = mat({{1.0}});
  kp.g = {std::sqrt(0.5)};
  const ModelBundle kol = make_kolmogorov(kp);
  std::vector<StateVector> kpts;
  for (double x : {0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0}) kpts.push_back({{x}, 0});
  CHECK(suite_diagnostics(kol.model, kol.suite, kpts).passed);
}

TEST_CASE("strong law ratios shrink") {
  std::vector<Trajectory> reps;
  SimConfig cfg;
  cfg.dt = 1e-2;
  cfg.t_final = 100;
  for (int r = 0; r < 40; ++r) {
    RngStream rng(4, static_cast<std::uint64_t>(r));
    reps.push_back(simulate(make_brownian(1), StateVector{{0.0}, 0}, cfg, rng));
  }
  const Observable f = [](const StateView& s) { return s.x[0]; };
  const Observable Lf = [](const StateView&) { return 0.0; };
  const StrongLawReport r = strong_law_check(reps, f, Lf, {1.0, 10.0, 100.0});
  CHECK(r.max_ratio.size() == 3);
  CHECK(r.shrinking);
  CHECK(code_of([&] {
          (void)strong_law_check(std::vector<Trajectory>(reps.begin(), reps.begin() + 5), f, Lf, {1.0});
        }) == ErrorCode::InvalidArgument);
}

}
