// SPDX-License-Identifier: Apache-2.0
//
// Average-Lyapunov machinery: the function suite attached to a model,
// Dynkin and quadratic-variation residuals, occupation averages and
// pointwise checks of the suite inequalities.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "extinctd/process.hpp"

namespace extinctd {

/// Functions V, H, GammaV, W, W', U, U' and the constant K attached to a model.
///
/// `V`, `LV` and `gammaV` live on M+ of the original model. `H` is the
/// continuous extension of LV; when the model ships a blow-up map it is a
/// function on the blown-up space, otherwise on the original one. `LW`, `LU`
/// and `gammaW` are optional closed forms; when empty the generator is applied
/// numerically.
struct LyapunovSuite {
  Observable V;
  Observable LV;
  Observable H;
  Observable gammaV;
  Observable W;
  Observable Wprime;
  Observable U;
  Observable Uprime;
  Observable LW;
  Observable LU;
  Observable gammaW;
  double K = 1.0;
  double alpha_candidate = 0.0;
};

/// Streaming time integral of named observables along a path. Trapezoidal
/// between grid points, left-constant into jump points. Time before
/// `burn_in` is excluded.
class OccupationAccumulator {
 public:
  explicit OccupationAccumulator(double burn_in = 0.0) : burn_in_(burn_in) {}

  /// Registers an observable; returns its slot index.
  std::size_t add(std::string name, Observable g);

  void observe(double t, const StateView& s, bool jump);

  /// Time integrated so far (after burn-in).
  double elapsed() const noexcept { return elapsed_; }
  double integral(std::size_t slot) const { return integrals_.at(slot); }
  double integral(const std::string& name) const { return integrals_.at(slot_of(name)); }
  /// Throws EmptyWindow when no time has been integrated.
  double average(std::size_t slot) const;
  double average(const std::string& name) const { return average(slot_of(name)); }

 private:
  std::size_t slot_of(const std::string& name) const;

  double burn_in_;
  double elapsed_ = 0.0;
  bool started_ = false;
  double last_t_ = 0.0;
  std::vector<std::string> names_;
  std::vector<Observable> fns_;
  std::vector<double> integrals_;
  std::vector<double> last_values_;
};

/// M_t = f(X_t) - f(X_0) - int_0^t Lf(X_s) ds at every grid point.
std::vector<double> dynkin_residual(const Trajectory& traj, const Observable& f,
                                    const Observable& Lf);

/// (M_t^f)^2 - int_0^t Gf(X_s) ds at every grid point.
std::vector<double> qv_residual(const Trajectory& traj, const Observable& f, const Observable& Lf,
                                const Observable& Gf);

/// int_0^t g(X_s) ds at every grid point, same quadrature as the residuals.
std::vector<double> running_integral(const Trajectory& traj, const Observable& g);

/// (1/(T - burn_in)) int_{burn_in}^T g(X_s) ds.
double occupation_average(const Trajectory& traj, const Observable& g, double burn_in);

struct TightnessReport {
  std::vector<double> times;
  std::vector<double> running_average;  // mu_t(W') at each grid point with t > 0
  double tail_max = 0.0;  // max of mu_t(W') over the final `tail_fraction` of the run
  double K = 0.0;
  double slack = 0.0;
  bool violated = false;
};

/// Running mu_t(W'); flags a violation when its tail exceeds K + slack.
TightnessReport tightness_check(const Trajectory& traj, const LyapunovSuite& suite,
                                double slack = 0.0, double tail_fraction = 0.1);

struct GeneratorValue {
  double Lf = 0.0;
  double gamma = 0.0;
};

struct GeneratorOptions {
  /// Monte Carlo draws for discrete chains (L = P - I).
  std::size_t chain_samples = 10000;
  std::uint64_t seed = 0x5eedULL;
};

/// (Lf, Gamma f) at x. Diffusions use central differences (gradient step
/// 1e-5 (1+|x_i|), second derivatives 1e-4 (1+|x_i|)) plus the switching
/// term; discrete chains use Monte Carlo over the step noise.
GeneratorValue apply_generator(const ModelSpec& model, const Observable& f, const StateView& x,
                               const GeneratorOptions& opts = {});

struct DiagnosticsReport {
  // Max over sample points of lhs - rhs for each inequality; <= 0 passes
  // (up to rounding of 1e-9 max(1, K)).
  double lw_violation = -HUGE_VAL;      // LW - (K - W')
  double lu_violation = -HUGE_VAL;      // LU - (K - U')
  double gamma_w_violation = -HUGE_VAL; // GammaW - K U'
  double gamma_v_violation = -HUGE_VAL; // GammaV - K U'
  std::size_t points = 0;
  bool passed = false;
};

DiagnosticsReport suite_diagnostics(const ModelSpec& model, const LyapunovSuite& suite,
                                    const std::vector<StateVector>& sample_points,
                                    const GeneratorOptions& opts = {});

/// sup |LV|/W' on each shell of sample points; a decreasing trend is
/// consistent with LV vanishing over W'.
std::vector<double> vanishing_trend(const LyapunovSuite& suite,
                                    const std::vector<std::vector<StateVector>>& shells);

struct StrongLawReport {
  std::vector<double> horizons;
  std::vector<double> max_ratio;   // max over replicas of |M_T| / T
  std::vector<double> rms_ratio;   // root mean square of |M_T| / T
  std::vector<double> shrink;      // max_ratio[k+1] / max_ratio[k]
  bool shrinking = false;
};

/// Evaluates |M_T^f|/T at each horizon (all replicas must reach the largest
/// horizon) and checks the ratio between consecutive horizons stays below 0.8.
StrongLawReport strong_law_check(const std::vector<Trajectory>& replicas, const Observable& f,
                                 const Observable& Lf, const std::vector<double>& horizons);

}  // namespace extinctd
