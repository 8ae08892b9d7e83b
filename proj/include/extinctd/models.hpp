// SPDX-License-Identifier: Apache-2.0
//
// Shipped model families. Each constructor returns the simulatable model,
// its Lyapunov suite and, where the boundary needs a blow-up, the blown-up
// model, the boundary dynamics and the coordinate maps between them.
#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "extinctd/integrators.hpp"
#include "extinctd/lyapunov.hpp"
#include "extinctd/process.hpp"

namespace extinctd {

using CoordMap = std::function<void(std::span<const double> from, std::span<double> to)>;

/// Blow-up of the original state space: `blown_up` simulates the lifted
/// process and `forward` maps it back, pathwise.
struct QuadrupleMap {
  ModelSpec blown_up;
  CoordMap forward;   // blown-up coordinates -> original coordinates
  CoordMap lift;      // right inverse of forward, defined off M0
  std::string boundary_preimage;  // description of forward^-1(M0)
};

struct ModelBundle {
  ModelSpec model;
  LyapunovSuite suite;
  /// Dynamics on the (blown-up) extinction set, and H in its coordinates.
  ModelSpec boundary;
  Observable boundary_H;
  /// Default starting points for boundary averages.
  std::vector<StateVector> boundary_ics;
  std::optional<QuadrupleMap> map;
  /// Per-species H_i for population models (empty otherwise).
  std::vector<Observable> species_H;
  /// Parameter-derived reference numbers written into reports.
  std::vector<std::pair<std::string, double>> reference;
};

// --- SIS epidemic on a network with Markovian switching ---------------------

struct SisParams {
  /// Adjacency per regime; a single matrix is shared by all regimes.
  std::vector<Eigen::MatrixXd> adjacency;
  std::vector<double> beta;
  std::vector<double> delta;
  /// Noise scale: sigma_i(u, s) = kappa(s) u.
  std::vector<double> kappa;
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(1, 1);
};

/// Throws InvalidAdjacency, NegativeRate, NegativeParameter, InvalidRateMatrix,
/// DimensionMismatch.
ModelBundle make_sis(const SisParams& p);

// --- Lorenz system near its origin ------------------------------------------

struct LorenzParams {
  double gamma = 1.0;
  double z_star = 0.5;
  double eta = 1.0;
  double alpha0 = 0.0;
};

/// Transformed constants from the classical (sigma, rho, beta) form with
/// noise amplitude alpha_hat on the third coordinate.
LorenzParams lorenz_from_classic(double sigma, double rho, double beta, double alpha_hat);

/// Throws NegativeParameter.
ModelBundle make_lorenz(const LorenzParams& p);

/// (theta, z) dynamics on the blown-up axis R = 0.
ModelSpec lorenz_boundary_model(double gamma, double z_star, double eta, double alpha0);
/// 1 - (z/2) sin(2 theta) on (theta, z); also accepts (theta, R, z).
Observable lorenz_boundary_H();

// --- Discrete-time ecological chains ----------------------------------------

/// Writes the growth factors F_i(z, xi) into `out`.
using GrowthFn = std::function<void(const StateView& z, std::span<const double> xi,
                                    std::span<double> out)>;

struct EcoDiscreteParams {
  std::size_t n_species = 1;
  GrowthFn F;
  NoiseSamplerFn noise;  // iid standard normals when empty
  std::size_t noise_dim = 1;
  /// Weights p_i of V = -sum p_i log x_i (all ones when empty).
  std::vector<double> p;
  /// Proper function with P Upsilon <= rho^2 Upsilon + C^2 (1 + sum x_i when empty).
  Observable upsilon;
  double rho = 0.0;
  double C2 = 1.0;
  /// Inner Monte Carlo draws for H_i; antithetic pairs assume a symmetric noise law.
  std::size_t inner_samples = 10000;
  bool antithetic = true;
  std::uint64_t inner_seed = 0x1c0ffeeULL;
};

/// Throws NonPositiveF from the step map when F <= 0, DimensionMismatch.
ModelBundle make_ecological_discrete(const EcoDiscreteParams& p);

/// X_i' = X_i exp(r_i - (B X)_i + sigma_i xi_i) with B_ii > 0, B_ij >= 0.
ModelBundle make_ricker(const std::vector<double>& r, const Eigen::MatrixXd& B,
                        const std::vector<double>& sigma, std::vector<double> p = {},
                        std::size_t inner_samples = 10000);

// --- Kolmogorov (Lotka-Volterra) SDEs ----------------------------------------

/// dX_i = X_i (r_i - (B X)_i) dt + X_i g_i dE_i with E = A^T W.
struct KolmogorovParams {
  std::vector<double> r;
  Eigen::MatrixXd B;
  std::vector<double> g;
  /// Noise matrix A (k x n); identity when empty.
  Eigen::MatrixXd A;
  std::vector<double> p;
};

/// Throws DimensionMismatch, NegativeParameter.
ModelBundle make_kolmogorov(const KolmogorovParams& p);

// --- Linear SDE benchmark -----------------------------------------------------

/// dx = A x dt + Sigma x dW with scalar W. Throws NonSquare, DimensionMismatch.
ModelBundle make_linear_sde(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Sigma);

// --- Small reference processes used by tests and diagnostics ----------------

/// Standard Brownian motion in R^dim (extinction set: the origin).
ModelSpec make_brownian(std::size_t dim);
/// dX = -theta X dt + sigma dW in one dimension.
ModelSpec make_ou(double theta, double sigma);

// --- Registry -----------------------------------------------------------------

/// Registered names, in listing order.
std::vector<std::string> model_names();
/// One-line description of a registered model.
std::string model_summary(const std::string& name);
/// Parameter keys a registered model accepts.
std::vector<std::string> model_parameter_keys(const std::string& name);
/// Builds a registered model. Throws UnknownModel, UnknownKey, MissingField.
ModelBundle make_model(const std::string& name, const ParamRecord& params);

/// max_t |forward(Y_t) - X_t| over [0, t_final] when the blown-up and the
/// original model are driven by the same random stream. Throws
/// InvalidArgument when the bundle has no blow-up.
double intertwining_gap(const ModelBundle& bundle, const StateVector& x0, const SimConfig& cfg,
                        std::uint64_t seed, std::uint64_t stream = 0);

}  // namespace extinctd
