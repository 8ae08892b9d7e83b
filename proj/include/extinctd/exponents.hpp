// SPDX-License-Identifier: Apache-2.0
//
// H-exponent and decay-slope estimators, and trajectory-level checks of the
// extinction-rate guarantee liminf V(X_t)/t >= alpha.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "extinctd/integrators.hpp"
#include "extinctd/lyapunov.hpp"

namespace extinctd {

enum class EstimateMethod { BoundaryAverage, TrajectorySlope, ClosedForm };

const char* method_name(EstimateMethod m) noexcept;

struct ExponentEstimate {
  double point = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n_replicas = 1;
  double horizon = 0.0;
  EstimateMethod method = EstimateMethod::ClosedForm;
};

/// Mean of per-replica values with a normal 95% interval from their spread.
ExponentEstimate estimate_from_replicas(const std::vector<double>& values, double horizon,
                                        EstimateMethod method);

ExponentEstimate closed_form_estimate(double value);

/// Knobs shared by the Monte Carlo estimators.
struct EstimatorOptions {
  std::uint64_t seed = 0;
  /// Offset added to every stream id (keeps separate experiments independent).
  std::uint64_t stream_base = 0;
  std::size_t threads = 1;
  /// Fraction of t_final discarded before occupation averages.
  double burn_in_fraction = 0.1;
  /// Final fraction of each path used by slope regressions.
  double window = 0.5;
};

struct BoundaryExponentReport {
  ExponentEstimate estimate;
  /// Replica-mean occupation average of H for each initial condition.
  std::vector<ExponentEstimate> per_ic;
  std::size_t argmin = 0;
};

/// Minimum over initial conditions of the replica-mean post-burn-in
/// occupation average of H along the boundary dynamics.
BoundaryExponentReport boundary_exponent(const ModelSpec& boundary_model, const Observable& H,
                                         const std::vector<StateVector>& ics, const SimConfig& cfg,
                                         std::size_t reps, const EstimatorOptions& opts = {});

/// OLS slope of V(X_t) against t over the final `window` fraction of the path.
ExponentEstimate trajectory_slope(const Trajectory& traj, const Observable& V, double window = 0.5);

struct ReplicaOutcome {
  std::size_t ic = 0;
  std::size_t replica = 0;
  double slope = 0.0;
  bool stopped_at_floor = false;
  /// False when the window was too short to regress (only possible after an early stop).
  bool has_slope = false;
};

struct SlopeReport {
  ExponentEstimate estimate;  // over replicas that produced a slope
  std::vector<ReplicaOutcome> outcomes;
};

/// Simulates every (ic, replica) pair and regresses V along each path.
SlopeReport slope_experiment(const ModelSpec& model, const Observable& V,
                             const std::vector<StateVector>& ics, const SimConfig& cfg,
                             std::size_t reps, const EstimatorOptions& opts = {});

struct ExtinctionReport {
  double fraction = 0.0;
  SlopeReport slopes;
};

/// Fraction of (ic, replica) pairs with slope >= alpha_candidate - tol or an
/// early stop at the extinction floor.
ExtinctionReport extinction_fraction(const ModelSpec& model, const LyapunovSuite& suite,
                                     const std::vector<StateVector>& ics, const SimConfig& cfg,
                                     std::size_t reps, double tol,
                                     const EstimatorOptions& opts = {});

/// A boundary model and its H for one parameter value.
using BoundaryFamily = std::function<std::pair<ModelSpec, Observable>(double theta)>;

struct ScanPoint {
  double theta = 0.0;
  ExponentEstimate estimate;
};

struct ScanReport {
  std::vector<ScanPoint> points;
  /// Index of the limit parameter theta_inf (defaults to the first grid value).
  std::size_t limit_index = 0;
  /// Largest amount by which a grid point's upper CI falls below the limit's
  /// lower CI, for the point nearest theta_inf.
  double nearest_drop = 0.0;
  bool envelope_ok = true;
};

/// boundary_exponent over a parameter grid, plus a lower-semicontinuity
/// check at theta_inf: the grid point nearest theta_inf may not fall below
/// the estimate at theta_inf by more than `jump_tolerance` beyond CI overlap.
ScanReport robustness_scan(const BoundaryFamily& family, const std::vector<double>& grid,
                           const std::vector<StateVector>& ics, const SimConfig& cfg,
                           std::size_t reps, const EstimatorOptions& opts = {},
                           std::size_t limit_index = 0, double jump_tolerance = 0.1);

/// -max Re(lambda) over the spectrum of A: the decay rate of dx = Ax dt.
double linear_sde_exponent(const Eigen::MatrixXd& A);

}  // namespace extinctd
