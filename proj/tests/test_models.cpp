// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "extinctd/integrators.hpp"
#include "extinctd/models.hpp"
#include "helpers.hpp"

using namespace extinctd;
using testutil::code_of;
using testutil::mat;

namespace {

SisParams k3() {
  SisParams p;
  p.adjacency = {mat({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}})};
  p.beta = {0.2, 0.6};
  p.delta = {1.0, 1.0};
  p.kappa = {0.5};
  p.Q = mat({{-1, 1}, {2, -2}});
  return p;
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("registry") {
  const std::vector<std::string> names = model_names();
  for (const char* n : {"sis", "lorenz", "eco-discrete", "kolmogorov", "linear"})
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
  CHECK(code_of([] { (void)make_model("nope", ParamRecord{}); }) == ErrorCode::UnknownModel);
  ParamRecord p;
  p.values["A"] = std::vector<std::vector<double>>{{-1.0}};
  p.values["Sigma"] = std::vector<std::vector<double>>{{0.5}};
  CHECK(make_model("linear", p).model.dim == 1);
  p.values["Sgima"] = 1.0;
  CHECK(code_of([&] { (void)make_model("linear", p); }) == ErrorCode::UnknownKey);
  CHECK_FALSE(model_summary("sis").empty());
}

TEST_CASE("SIS parameter validation") {
  SisParams p = k3();
  p.adjacency = {mat({{0, 1}, {0, 0}})};
  CHECK(code_of([&] { (void)make_sis(p); }) == ErrorCode::InvalidAdjacency);
  p = k3();
  p.beta = {-0.2, 0.6};
  CHECK(code_of([&] { (void)make_sis(p); }) == ErrorCode::NegativeRate);
  p = k3();
  p.Q = mat({{-1, 1}, {2, -1}});
  CHECK(code_of([&] { (void)make_sis(p); }) == ErrorCode::InvalidRateMatrix);
}

TEST_CASE("SIS paths stay in the unit cube and the origin is absorbing") {
  const ModelBundle b = make_sis(k3());
  SimConfig cfg;
  cfg.t_final = 5;
  cfg.max_rate_bound = 2;
  RngStream rng(1, 0);
  const Trajectory p = simulate(b.model, StateVector{{0.9, 0.5, 0.1}, 1}, cfg, rng);
  for (std::size_t k = 0; k < p.size(); ++k)
    for (double v : p.coords(k)) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  RngStream rng2(1, 0);
  const Trajectory z = simulate(b.model, StateVector{{0.0, 0.0, 0.0}, 0}, cfg, rng2);
  for (double v : z.coords(z.size() - 1)) CHECK(v == 0.0);
}

TEST_CASE("SIS reference index") {
  const ModelBundle b = make_sis(k3());
  // lambda1(K3) = 2, rho = (2/3, 1/3)
  const double expected = 2.0 / 3.0 * (1.0 - 0.4) + 1.0 / 3.0 * (1.0 - 1.2);
  CHECK(b.suite.alpha_candidate == doctest::Approx(expected));
}

TEST_CASE("Kolmogorov and Ricker faces are invariant") {
  KolmogorovParams kp;
  kp.r = {0.5, 0.3};
  kp.B = mat({{1.0, 0.2}, {0.3, 1.0}});
  kp.g = {0.4, 0.4};
  const ModelBundle kol = make_kolmogorov(kp);
  SimConfig cfg;
  cfg.t_final = 5;
  RngStream rng(2, 0);
  const Trajectory p = simulate(kol.model, StateVector{{0.0, 0.5}, 0}, cfg, rng);
  for (std::size_t k = 0; k < p.size(); ++k) {
    CHECK(p.coords(k)[0] == 0.0);
    CHECK(p.coords(k)[1] >= 0.0);
  }
  const ModelBundle ric = make_ricker({0.5, 0.2}, mat({{1.0, 0.1}, {0.1, 1.0}}), {0.1, 0.1}, {}, 50);
  SimConfig dcfg;
  dcfg.t_final = 30;
  RngStream rng2(3, 0);
  const Trajectory q = simulate(ric.model, StateVector{{0.3, 0.0}, 0}, dcfg, rng2);
  for (std::size_t k = 0; k < q.size(); ++k) {
    CHECK(q.coords(k)[1] == 0.0);
    CHECK(q.coords(k)[0] > 0.0);
  }
}

TEST_CASE("competition matrices must be nonnegative") {
  CHECK(code_of([] { (void)make_ricker({0.5}, mat({{-1.0}}), {0.1}); }) == ErrorCode::NegativeParameter);
  KolmogorovParams kp;
  kp.r = {0.5, 0.3};
  kp.B = mat({{1.0, -0.2}, {0.3, 1.0}});
  kp.g = {0.4, 0.4};
  CHECK(code_of([&] { (void)make_kolmogorov(kp); }) == ErrorCode::NegativeParameter);
}

TEST_CASE("Lorenz parameter checks") {
  LorenzParams lp;
  lp.eta = 0.4;
  CHECK(code_of([&] { (void)make_lorenz(lp); }) == ErrorCode::InvalidArgument);
  lp.eta = 1.0;
  lp.gamma = -1.0;
  CHECK(code_of([&] { (void)make_lorenz(lp); }) == ErrorCode::NegativeParameter);
  lp.gamma = 1.0;
  const ModelBundle b = make_lorenz(lp);
  CHECK(b.model.dim == 3);
  CHECK(b.boundary.dim == 2);
}

TEST_CASE("blow-up maps invert off the extinction set") {
  const ModelBundle sis = make_sis(k3());
  const ModelBundle lin = make_linear_sde(mat({{-1, 0.5}, {0.2, -2}}), mat({{0.3, 0}, {0, 0.4}}));
  LorenzParams lp;
  const ModelBundle lor = make_lorenz(lp);
  RngStream rng(5, 0);
  for (const ModelBundle* b : {&sis, &lin, &lor}) {
    REQUIRE(b->map.has_value());
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> x(b->model.dim);
      for (double& v : x) v = 0.05 + 0.9 * rng.uniform();
      std::vector<double> y(b->map->blown_up.dim), back(b->model.dim);
      b->map->lift(x, y);
      b->map->forward(y, back);
      for (std::size_t i = 0; i < x.size(); ++i) CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("blown-up and original paths agree to first order without noise") {
  SisParams p = k3();
  p.kappa = {0.0};
  const ModelBundle b = make_sis(p);
  SimConfig cfg;
  cfg.t_final = 5;
  cfg.max_rate_bound = 2;
  cfg.dt = 2e-3;
  const double coarse = intertwining_gap(b, StateVector{{0.6, 0.2, 0.1}, 0}, cfg, 1, 0);
  CHECK(coarse < 5e-3);
}

TEST_CASE("species H matches the boundary H for one species") {
  const ModelBundle b = make_ricker({-0.3}, mat({{1.0}}), {0.2});
  const std::vector<double> zero{0.0};
  CHECK(b.species_H[0](StateView{zero, 0}) == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(b.suite.alpha_candidate == doctest::Approx(0.3).epsilon(1e-9));
}

}
