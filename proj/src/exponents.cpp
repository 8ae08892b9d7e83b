// SPDX-License-Identifier: Apache-2.0
#include "extinctd/exponents.hpp"

#include <algorithm>
#include <cmath>

#include "extinctd/criteria.hpp"
#include "extinctd/parallel.hpp"
#include "extinctd/stats.hpp"

namespace extinctd {

namespace {

constexpr double kZ95 = 1.959963984540054;

std::uint64_t stream_of(const EstimatorOptions& opts, std::size_t ic, std::size_t rep,
                        std::size_t reps) {
  return opts.stream_base + static_cast<std::uint64_t>(ic) * reps + rep;
}

}  // namespace

const char* method_name(EstimateMethod m) noexcept {
  switch (m) {
    case EstimateMethod::BoundaryAverage: return "boundary_average";
    case EstimateMethod::TrajectorySlope: return "trajectory_slope";
    case EstimateMethod::ClosedForm: return "closed_form";
  }
  return "?";
}

ExponentEstimate estimate_from_replicas(const std::vector<double>& values, double horizon,
                                        EstimateMethod method) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "no replica values to summarize");
  const RunningStats s = summarize(values);
  ExponentEstimate e;
  e.point = s.mean();
  const double half = kZ95 * s.standard_error();
  e.ci_low = e.point - half;
  e.ci_high = e.point + half;
  e.n_replicas = values.size();
  e.horizon = horizon;
  e.method = method;
  return e;
}

ExponentEstimate closed_form_estimate(double value) {
  ExponentEstimate e;
  e.point = e.ci_low = e.ci_high = value;
  e.method = EstimateMethod::ClosedForm;
  return e;
}

BoundaryExponentReport boundary_exponent(const ModelSpec& boundary_model, const Observable& H,
                                         const std::vector<StateVector>& ics, const SimConfig& cfg,
                                         std::size_t reps, const EstimatorOptions& opts) {
  if (ics.empty()) throw Error(ErrorCode::InvalidArgument, "boundary_exponent needs initial conditions");
  if (reps == 0) throw Error(ErrorCode::InvalidArgument, "replicas must be >= 1");
  cfg.validate();
  const double burn_in = opts.burn_in_fraction * cfg.t_final;
  std::vector<double> averages(ics.size() * reps);
  parallel_for(averages.size(), opts.threads, [&](std::size_t job) {
    const std::size_t ic = job / reps;
    const std::size_t rep = job % reps;
    RngStream rng(opts.seed, stream_of(opts, ic, rep, reps));
    OccupationAccumulator acc(burn_in);
    acc.add("H", H);
    // Boundary dynamics never use the extinction floor.
    SimConfig run = cfg;
    run.floor_epsilon = 1e-300;
    simulate_streaming(boundary_model, ics[ic], run, rng,
                       [&](double t, const StateView& s, bool jump) { acc.observe(t, s, jump); });
    averages[job] = acc.average(0);
  });

  BoundaryExponentReport report;
  for (std::size_t ic = 0; ic < ics.size(); ++ic) {
    std::vector<double> vals(averages.begin() + static_cast<std::ptrdiff_t>(ic * reps),
                             averages.begin() + static_cast<std::ptrdiff_t>((ic + 1) * reps));
    report.per_ic.push_back(
        estimate_from_replicas(vals, cfg.t_final, EstimateMethod::BoundaryAverage));
  }
  for (std::size_t ic = 1; ic < ics.size(); ++ic)
    if (report.per_ic[ic].point < report.per_ic[report.argmin].point) report.argmin = ic;
  report.estimate = report.per_ic[report.argmin];
  return report;
}

ExponentEstimate trajectory_slope(const Trajectory& traj, const Observable& V, double window) {
  if (!(window > 0.0 && window <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "window must lie in (0, 1]");
  const double start = traj.duration() * (1.0 - window);
  auto first = std::lower_bound(traj.times().begin(), traj.times().end(), start);
  const std::size_t k0 = static_cast<std::size_t>(first - traj.times().begin());
  const std::size_t count = traj.size() - k0;
  if (count < 100)
    throw Error(ErrorCode::WindowTooShort,
                "slope window holds " + std::to_string(count) + " points, need >= 100");
  // Centered sums keep the regression well conditioned for long horizons.
  double t_mean = 0.0;
  double v_mean = 0.0;
  std::vector<double> values(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double v = V(traj.view(k0 + k));
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteObservable, "V is not finite in the slope window");
    values[k] = v;
    t_mean += traj.time(k0 + k);
    v_mean += v;
  }
  t_mean /= static_cast<double>(count);
  v_mean /= static_cast<double>(count);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double dt = traj.time(k0 + k) - t_mean;
    sxy += dt * (values[k] - v_mean);
    sxx += dt * dt;
  }
  ExponentEstimate e;
  e.point = sxy / sxx;
  e.ci_low = e.ci_high = e.point;
  e.n_replicas = 1;
  e.horizon = traj.duration();
  e.method = EstimateMethod::TrajectorySlope;
  return e;
}

SlopeReport slope_experiment(const ModelSpec& model, const Observable& V,
                             const std::vector<StateVector>& ics, const SimConfig& cfg,
                             std::size_t reps, const EstimatorOptions& opts) {
  if (ics.empty()) throw Error(ErrorCode::InvalidArgument, "slope experiment needs initial conditions");
  if (reps == 0) throw Error(ErrorCode::InvalidArgument, "replicas must be >= 1");
  SlopeReport report;
  report.outcomes.resize(ics.size() * reps);
  parallel_for(report.outcomes.size(), opts.threads, [&](std::size_t job) {
    ReplicaOutcome& out = report.outcomes[job];
    out.ic = job / reps;
    out.replica = job % reps;
    RngStream rng(opts.seed, stream_of(opts, out.ic, out.replica, reps));
    const Trajectory traj = simulate(model, ics[out.ic], cfg, rng);
    out.stopped_at_floor = traj.stopped_at_floor;
    try {
      out.slope = trajectory_slope(traj, V, opts.window).point;
      out.has_slope = true;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::WindowTooShort || !traj.stopped_at_floor) throw;
    }
  });
  std::vector<double> slopes;
  for (const ReplicaOutcome& o : report.outcomes)
    if (o.has_slope) slopes.push_back(o.slope);
  if (slopes.empty()) {
    report.estimate.n_replicas = 0;
    report.estimate.method = EstimateMethod::TrajectorySlope;
    report.estimate.horizon = cfg.t_final;
    report.estimate.point = report.estimate.ci_low = report.estimate.ci_high = std::nan("");
  } else {
    report.estimate = estimate_from_replicas(slopes, cfg.t_final, EstimateMethod::TrajectorySlope);
  }
  return report;
}

ExtinctionReport extinction_fraction(const ModelSpec& model, const LyapunovSuite& suite,
                                     const std::vector<StateVector>& ics, const SimConfig& cfg,
                                     std::size_t reps, double tol, const EstimatorOptions& opts) {
  ExtinctionReport report;
  report.slopes = slope_experiment(model, suite.V, ics, cfg, reps, opts);
  std::size_t hits = 0;
  for (ReplicaOutcome& o : report.slopes.outcomes) {
    if (o.stopped_at_floor) {
      ++hits;
      if (!o.has_slope) o.slope = suite.alpha_candidate;
    } else if (o.has_slope && o.slope >= suite.alpha_candidate - tol) {
      ++hits;
    }
  }
  report.fraction = static_cast<double>(hits) / static_cast<double>(report.slopes.outcomes.size());
  return report;
}

ScanReport robustness_scan(const BoundaryFamily& family, const std::vector<double>& grid,
                           const std::vector<StateVector>& ics, const SimConfig& cfg,
                           std::size_t reps, const EstimatorOptions& opts,
                           std::size_t limit_index, double jump_tolerance) {
  if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "robustness scan needs a nonempty grid");
  if (limit_index >= grid.size()) throw Error(ErrorCode::IndexOutOfRange, "limit index outside grid");
  ScanReport report;
  report.limit_index = limit_index;
  std::size_t dim = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    auto [model, H] = family(grid[g]);
    if (g == 0) dim = model.dim;
    if (model.dim != dim) throw Error(ErrorCode::DimensionMismatch, "scan models must share a dimension");
    EstimatorOptions point_opts = opts;
    point_opts.stream_base = opts.stream_base + g * ics.size() * reps;
    report.points.push_back(
        {grid[g], boundary_exponent(model, H, ics, cfg, reps, point_opts).estimate});
  }
  if (grid.size() > 1) {
    const double theta_inf = grid[limit_index];
    std::size_t nearest = limit_index == 0 ? 1 : 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      if (g == limit_index) continue;
      if (std::abs(grid[g] - theta_inf) < std::abs(grid[nearest] - theta_inf)) nearest = g;
    }
    const ExponentEstimate& lim = report.points[limit_index].estimate;
    const ExponentEstimate& near = report.points[nearest].estimate;
    report.nearest_drop = std::max(0.0, lim.ci_low - near.ci_high);
    report.envelope_ok = report.nearest_drop <= jump_tolerance;
  }
  return report;
}

double linear_sde_exponent(const Eigen::MatrixXd& A) { return -max_real_eigenvalue(A); }

}  // namespace extinctd
