// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <string>

#include "doctest.h"
#include "extinctd/process.hpp"
#include "extinctd/stats.hpp"
#include "helpers.hpp"

using namespace extinctd;
using testutil::code_of;

TEST_SUITE("process") {

TEST_CASE("streams are reproducible and distinct") {
  RngStream a(42, 3), b(42, 3), c(42, 4), d(43, 3);
  bool differ_c = false, differ_d = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.normal();
    CHECK(x == b.normal());
    differ_c |= x != c.normal();
    differ_d |= x != d.normal();
  }
  CHECK(differ_c);
  CHECK(differ_d);
}

TEST_CASE("normal and exponential moments") {
  RngStream g(1, 0);
  RunningStats z, z2, e;
  for (int i = 0; i < 200000; ++i) {
    const double v = g.normal();
    z.add(v);
    z2.add(v * v);
    e.add(g.exponential(2.0));
  }
  CHECK(std::abs(z.mean()) < 5 * z.standard_error());
  CHECK(std::abs(z2.mean() - 1.0) < 5 * z2.standard_error());
  CHECK(std::abs(e.mean() - 0.5) < 5 * e.standard_error());
}

TEST_CASE("uniforms stay in range") {
  RngStream g(5, 0);
  for (int i = 0; i < 10000; ++i) {
    const double u = g.uniform();
    const double o = g.uniform_open();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(o > 0.0);
    CHECK(o < 1.0);
  }
}

TEST_CASE("rate matrix checks") {
  CHECK(code_of([] { check_rate_matrix(std::vector<double>{-1, 1, 2, -2}, 2); }) == ErrorCode::Ok);
  CHECK(code_of([] { check_rate_matrix(std::vector<double>{1, -1, 2, -2}, 2); }) == ErrorCode::InvalidRateMatrix);
  CHECK(code_of([] { check_rate_matrix(std::vector<double>{-1, 2, 2, -2}, 2); }) == ErrorCode::InvalidRateMatrix);
  CHECK(code_of([] { check_rate_matrix(std::vector<double>{-1, 1, 2}, 2); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("model validation") {
  ModelSpec m;
  m.family = Family::Sde;
  m.dim = 1;
  m.noise_dim = 0;
  m.extinction_distance = [](const StateView& s) { return std::abs(s.x[0]); };
  CHECK(code_of([&] { validate_model(m); }) == ErrorCode::MissingField);
  m.drift = [](const StateView& s, std::span<double> out) { out[0] = -s.x[0]; };
  CHECK(code_of([&] { validate_model(m); }) == ErrorCode::Ok);
  m.regimes = 2;
  CHECK(code_of([&] { validate_model(m); }) == ErrorCode::DimensionMismatch);
  m.regimes = 1;
  m.family = Family::SwitchingDiffusion;
  CHECK(code_of([&] { validate_model(m); }) == ErrorCode::MissingField);
  m.family = Family::DiscreteChain;
  CHECK(code_of([&] { validate_model(m); }) == ErrorCode::MissingField);
}

TEST_CASE("trajectory invariants") {
  Trajectory t(2);
  const std::vector<double> x{1.0, 2.0};
  CHECK(code_of([&] { t.push(0.5, StateView{x, 0}, false); }) == ErrorCode::InvalidArgument);
  t.push(0.0, StateView{x, 0}, false);
  t.push(0.1, StateView{x, 0}, false);
  CHECK(code_of([&] { t.push(0.1, StateView{x, 0}, false); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { t.push(0.2, StateView{x, 1}, false); }) == ErrorCode::InvalidArgument);
  t.push(0.2, StateView{x, 1}, true);
  CHECK(t.size() == 3);
  CHECK(t.regime(2) == 1);
  CHECK(t.is_jump(2));
  CHECK_FALSE(t.is_jump(1));
  CHECK(t.duration() == doctest::Approx(0.2));
  const std::vector<double> bad{1.0};
  CHECK(code_of([&] { t.push(0.3, StateView{bad, 1}, false); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("parameter record promotions") {
  ParamRecord r;
  r.values["a"] = 2.0;
  r.values["v"] = std::vector<double>{3.0};
  r.values["m"] = std::vector<std::vector<double>>{{1, 2}, {3, 4}};
  r.values["s"] = std::string("x");
  CHECK(r.number("a") == 2.0);
  CHECK(r.number("v") == 3.0);
  CHECK(r.vector("a") == std::vector<double>{2.0});
  CHECK(r.matrix("a").size() == 1);
  CHECK(r.tensor("m").size() == 1);
  CHECK(r.number_or("missing", 7.0) == 7.0);
  CHECK(r.text("s") == "x");
  CHECK(code_of([&] { (void)r.number("missing"); }) == ErrorCode::MissingField);
  CHECK(code_of([&] { (void)r.number("s"); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("error messages carry the code name") {
  const Error e(ErrorCode::InvalidRateMatrix, "row 0");
  CHECK(std::string(e.what()) == "InvalidRateMatrix: row 0");
  CHECK(e.code() == ErrorCode::InvalidRateMatrix);
}

}
