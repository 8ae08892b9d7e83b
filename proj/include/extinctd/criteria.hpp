// SPDX-License-Identifier: Apache-2.0
//
// Closed-form and semi-analytic extinction criteria for the shipped model
// families, and the small linear-algebra kernels behind them.
//
// Sign convention: every criterion returns an extinction index in the sense
// of the H-exponent alpha, so a positive value certifies extinction. Where
// the classical statement is "something < 0" the index is its negation. The
// one exception is lorenz_lambda_mc/lorenz_lambda0, which keep the lambda
// convention of the Lorenz literature (negative certifies extinction).
#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "extinctd/exponents.hpp"
#include "extinctd/integrators.hpp"

namespace extinctd {

/// Generator of a finite continuous-time Markov chain.
class CtmcGenerator {
 public:
  /// Throws NonSquare or InvalidRateMatrix.
  explicit CtmcGenerator(Eigen::MatrixXd q);

  const Eigen::MatrixXd& q() const noexcept { return q_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(q_.rows()); }
  /// True when the positive-rate graph is strongly connected.
  bool irreducible() const noexcept { return irreducible_; }

 private:
  Eigen::MatrixXd q_;
  bool irreducible_ = false;
};

/// Solves rho Q = 0, sum rho = 1. Throws Reducible or SingularSolve.
Eigen::VectorXd ctmc_stationary(const CtmcGenerator& gen);

struct TopEigen {
  double value = 0.0;
  Eigen::VectorXd vector;
};

/// Largest eigenvalue of a symmetric matrix by shifted power iteration. The
/// returned unit vector has nonnegative entry sum (the Perron vector for
/// irreducible nonnegative input). Throws NonSquare, InvalidArgument for
/// asymmetric input, NoConvergence.
TopEigen top_eigenvalue(const Eigen::MatrixXd& a, double tol = 1e-12,
                        std::size_t max_iter = 200000);

/// max Re(lambda) over the spectrum of a general square matrix.
double max_real_eigenvalue(const Eigen::MatrixXd& a);

/// sum_s rho_s (delta_s - beta_s lambda1_s). Throws LengthMismatch.
double sis_extinction_index(const std::vector<double>& delta, const std::vector<double>& beta,
                            const std::vector<double>& lambda1, const std::vector<double>& rho);

/// sqrt(z* - 1) - 1 for z* > 1, otherwise -1.
double lorenz_lambda0(double z_star);

struct BoundaryMeasure {
  std::string label;
  double h_integral = 0.0;  // integral of 1 - (z/2) sin(2 theta)
};

/// Ergodic measures of the noiseless Lorenz cylinder dynamics: the rotating
/// circle when z* < 1, the fixed points sin^2 theta = 1/z* otherwise.
std::vector<BoundaryMeasure> lorenz_boundary_measures(double z_star);

/// -(min over lorenz_boundary_measures of the H integral).
double lorenz_lambda_measures(double z_star);

/// -(occupation average of 1 - (z/2) sin(2 theta)) along the boundary
/// cylinder dynamics, minimized over `ics` (theta, z). Default ics are used
/// when empty.
ExponentEstimate lorenz_lambda_mc(double gamma, double z_star, double eta, double alpha0,
                                  const SimConfig& cfg, std::size_t reps,
                                  const EstimatorOptions& opts = {},
                                  std::vector<StateVector> ics = {});

/// Occupation average of -H_i along the boundary dynamics where species i
/// is absent. With several ics the largest average is reported.
ExponentEstimate invasion_rate(const ModelSpec& boundary_model, std::size_t species_index,
                               const Observable& H_i, const std::vector<StateVector>& ics,
                               const SimConfig& cfg, std::size_t reps,
                               const EstimatorOptions& opts = {});

struct InvasionCriterion {
  double value = 0.0;
  double ci_high = 0.0;
  bool extinct = false;
};

/// sum p_i r_i with the interval half-widths combined in quadrature;
/// extinct when the upper end is negative. Throws LengthMismatch,
/// NegativeParameter for non-positive weights.
InvasionCriterion weighted_invasion_criterion(const std::vector<double>& p,
                                              const std::vector<ExponentEstimate>& rates);
InvasionCriterion weighted_invasion_criterion(const std::vector<double>& p,
                                              const std::vector<double>& rates);

/// One coordinate of a vector field, evaluated at a state.
using ComponentFn = std::function<double(const StateView&, std::size_t i)>;

/// x -> Sigma_ii g_i(x)^2 / 2 - f_i(x). Throws IndexOutOfRange, NonSquare.
Observable kolmogorov_H(ComponentFn f, ComponentFn g, const Eigen::MatrixXd& sigma,
                        std::size_t i);

}  // namespace extinctd
