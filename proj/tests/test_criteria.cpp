// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>

#include "doctest.h"
#include "extinctd/criteria.hpp"
#include "extinctd/models.hpp"
#include "helpers.hpp"

using namespace extinctd;
using testutil::code_of;
using testutil::mat;

TEST_SUITE("criteria") {

TEST_CASE("stationary laws of small chains") {
  const Eigen::VectorXd a = ctmc_stationary(CtmcGenerator(mat({{-1, 1}, {1, -1}})));
  CHECK(a(0) == doctest::Approx(0.5));
  CHECK(a(1) == doctest::Approx(0.5));
  const Eigen::VectorXd b = ctmc_stationary(CtmcGenerator(mat({{-1, 1}, {2, -2}})));
  CHECK(b(0) == doctest::Approx(2.0 / 3.0));
  CHECK(b(1) == doctest::Approx(1.0 / 3.0));
  const Eigen::VectorXd c = ctmc_stationary(CtmcGenerator(mat({{0}})));
  CHECK(c(0) == 1.0);
}

TEST_CASE("generator validation") {
  CHECK(code_of([] { CtmcGenerator(Eigen::MatrixXd::Zero(2, 3)); }) == ErrorCode::NonSquare);
  CHECK(code_of([] { CtmcGenerator(mat({{-1, 1}, {1, 0}})); }) == ErrorCode::InvalidRateMatrix);
  const CtmcGenerator red(mat({{-1, 1}, {0, 0}}));
  CHECK_FALSE(red.irreducible());
  CHECK(code_of([&] { (void)ctmc_stationary(red); }) == ErrorCode::Reducible);
}

TEST_CASE("stationary law solves rho Q = 0 for random chains") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> rate(0.0, 3.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 2 + trial % 7;
    Eigen::MatrixXd q(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) q(i, j) = i == j ? 0.0 : rate(gen) + 0.01;
      q(i, i) = -q.row(i).sum();
    }
    const Eigen::VectorXd rho = ctmc_stationary(CtmcGenerator(q));
    CHECK(rho.sum() == doctest::Approx(1.0));
    CHECK(rho.minCoeff() >= 0.0);
    CHECK((rho.transpose() * q).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("power iteration matches a symmetric eigensolver") {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n : {1, 2, 5, 17, 40}) {
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = u(gen);
    const TopEigen t = top_eigenvalue(a);
    const double ref = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a).eigenvalues().maxCoeff();
    CHECK(t.value == doctest::Approx(ref).epsilon(1e-10));
    CHECK((a * t.vector - t.value * t.vector).norm() < 1e-8);
    CHECK(t.vector.sum() >= 0.0);
  }
  CHECK(top_eigenvalue(mat({{0, 1}, {1, 0}})).value == doctest::Approx(1.0));
  CHECK(top_eigenvalue(Eigen::MatrixXd::Zero(3, 3)).value == 0.0);
  CHECK(code_of([] { (void)top_eigenvalue(mat({{0, 1}, {0, 0}})); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("SIS extinction index") {
  CHECK(sis_extinction_index({1.0}, {0.3}, {1.0}, {1.0}) == doctest::Approx(0.7));
  CHECK(sis_extinction_index({1.0, 1.0}, {0.3, 1.5}, {1.0, 1.0}, {2.0 / 3.0, 1.0 / 3.0}) ==
        doctest::Approx(0.3));
  CHECK(code_of([] { (void)sis_extinction_index({1.0}, {0.3, 0.2}, {1.0}, {1.0}); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("Lorenz boundary exponent in closed form") {
  CHECK(lorenz_lambda0(2.0) == doctest::Approx(0.0));
  CHECK(lorenz_lambda0(1.25) == doctest::Approx(-0.5));
  CHECK(lorenz_lambda0(0.5) == doctest::Approx(-1.0));
  for (double z : {0.3, 0.9, 1.25, 2.0, 4.0}) CHECK(lorenz_lambda_measures(z) == doctest::Approx(lorenz_lambda0(z)));
  CHECK(lorenz_boundary_measures(0.5).size() == 1);
  CHECK(lorenz_boundary_measures(2.0).size() == 2);
}

TEST_CASE("Lorenz Monte Carlo exponent") {
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_final = 100;
  const ExponentEstimate e = lorenz_lambda_mc(1.0, 0.5, 1.0, 0.0, cfg, 1);
  CHECK(e.point == doctest::Approx(-1.0).epsilon(0.02));
}

TEST_CASE("weighted invasion criterion") {
  const InvasionCriterion c = weighted_invasion_criterion({0.5, 0.5}, std::vector<double>{-0.2, 0.1});
  CHECK(c.value == doctest::Approx(-0.05));
  CHECK(c.extinct);
  CHECK_FALSE(weighted_invasion_criterion({1.0}, std::vector<double>{0.1}).extinct);
  ExponentEstimate wide = closed_form_estimate(-0.05);
  wide.ci_low = -0.2;
  wide.ci_high = 0.1;
  CHECK_FALSE(weighted_invasion_criterion({1.0}, {wide}).extinct);
  CHECK(code_of([] { (void)weighted_invasion_criterion({1.0}, std::vector<double>{0.1, 0.2}); }) ==
        ErrorCode::LengthMismatch);
}

TEST_CASE("Kolmogorov H at the origin") {
  const ComponentFn f = [](const StateView& s, std::size_t) { return 0.05 - s.x[0]; };
  const ComponentFn g = [](const StateView&, std::size_t) { return 1.0; };
  const Observable H = kolmogorov_H(f, g, mat({{0.5}}), 0);
  const std::vector<double> zero{0.0};
  CHECK(H(StateView{zero, 0}) == doctest::Approx(0.2));
}

TEST_CASE("Ricker invasion rate") {
  const ModelBundle b = make_ricker({0.5}, mat({{1.0}}), {0.2});
  SimConfig cfg;
  cfg.t_final = 200;
  const ExponentEstimate e = invasion_rate(b.boundary, 0, b.species_H[0], {StateVector{{0.0}, 0}}, cfg, 1);
  CHECK(e.point == doctest::Approx(0.5).epsilon(0.02));
  CHECK(code_of([&] { (void)invasion_rate(b.boundary, 3, b.species_H[0], {StateVector{{0.0}, 0}}, cfg, 1); }) ==
        ErrorCode::IndexOutOfRange);
}

}
