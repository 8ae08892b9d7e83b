// SPDX-License-Identifier: Apache-2.0
//
// Time-stepping kernels: Euler-Maruyama, regime jumps by thinning, discrete
// chain steps and Poissonization.
#pragma once

#include <functional>
#include <span>
#include <vector>

#include "extinctd/process.hpp"

namespace extinctd {

struct SimConfig {
  double dt = 1e-3;
  double t_final = 1.0;
  /// Upper bound on sup |q_ii(x)| used by the thinning clock.
  double max_rate_bound = 1.0;
  /// Paths started off M0 stop once d(x, M0) drops below this.
  double floor_epsilon = 1e-300;
  /// Record every k-th grid point (jumps and the final point are always kept).
  std::size_t record_every = 1;

  void validate() const;
  bool operator==(const SimConfig&) const = default;
};

struct RegimeEvent {
  double offset;  // time since the start of the step
  std::size_t regime;  // regime entered at `offset`
};

/// One explicit Euler-Maruyama step; `noise` holds noise_dim standard
/// normals, scaled by sqrt(dt) internally. The regime is left unchanged.
StateVector em_step(const ModelSpec& model, const StateView& x, double dt,
                    std::span<const double> noise);

/// One step of a switching diffusion. Regime events inside [0, dt) come from
/// a rate-`rate_bound` Poisson clock thinned with |q_ii(x)|/rate_bound, x
/// being the step's start state; the diffusion is advanced piecewise between
/// events. Accepted events are appended to `events` when non-null.
StateVector switch_step(const ModelSpec& model, const StateView& x, double dt, double rate_bound,
                        RngStream& rng, std::vector<RegimeEvent>* events = nullptr);

/// One step of a discrete chain with fresh noise.
StateVector discrete_step(const ModelSpec& model, const StateView& z, RngStream& rng);

/// Continuous-time embedding Y_t = X_{N_t} with N a unit-rate Poisson clock.
/// Every arrival is a jump point; the final point sits at t_final.
Trajectory poissonize(const ModelSpec& chain, const StateVector& x0, RngStream& rng,
                      double t_final);

struct SimSummary {
  double t_end = 0.0;
  bool stopped_at_floor = false;
  std::size_t steps = 0;
};

/// Receives every recorded point in time order.
using PathObserver = std::function<void(double t, const StateView& state, bool jump)>;

/// Runs the model from x0 until t_final or until the extinction floor is hit.
/// Discrete chains advance one step per unit time and ignore cfg.dt.
SimSummary simulate_streaming(const ModelSpec& model, const StateVector& x0, const SimConfig& cfg,
                              RngStream& rng, const PathObserver& observer);

Trajectory simulate(const ModelSpec& model, const StateVector& x0, const SimConfig& cfg,
                    RngStream& rng);

}  // namespace extinctd
