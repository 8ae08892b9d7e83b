// SPDX-License-Identifier: Apache-2.0
#include "extinctd/integrators.hpp"

#include <cmath>
#include <string>

namespace extinctd {

void SimConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::InvalidConfig, "dt must be positive");
  if (!(t_final > 0.0) || !std::isfinite(t_final))
    throw Error(ErrorCode::InvalidConfig, "t_final must be positive");
  if (dt > t_final) throw Error(ErrorCode::InvalidConfig, "dt must not exceed t_final");
  if (!(max_rate_bound > 0.0)) throw Error(ErrorCode::InvalidConfig, "max_rate_bound must be positive");
  if (!(floor_epsilon > 0.0)) throw Error(ErrorCode::InvalidConfig, "floor_epsilon must be positive");
  if (record_every == 0) throw Error(ErrorCode::InvalidConfig, "record_every must be at least 1");
}

namespace {

void check_finite(std::span<const double> x) {
  for (double v : x)
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteState, "state left the finite range");
}

// Scratch buffers for one trajectory; steppers never allocate per step.
class Workspace {
 public:
  explicit Workspace(const ModelSpec& model)
      : model_(model),
        drift_(model.dim),
        diffusion_(model.dim * model.noise_dim),
        noise_(std::max(model.noise_dim, std::size_t{1})),
        next_(model.dim),
        rates_(model.regimes * model.regimes) {}

  // x <- projection(x + F dt + sigma sqrt(dt) noise)
  void euler(std::span<double> x, std::size_t regime, double h, std::span<const double> noise) {
    const StateView view(x, regime);
    model_.drift(view, drift_);
    const double sqrt_h = std::sqrt(h);
    const std::size_t d = model_.noise_dim;
    if (d > 0) model_.diffusion(view, diffusion_);
    for (std::size_t i = 0; i < model_.dim; ++i) {
      double acc = x[i] + drift_[i] * h;
      for (std::size_t k = 0; k < d; ++k) acc += diffusion_[i * d + k] * sqrt_h * noise[k];
      next_[i] = acc;
    }
    if (model_.domain_projection) model_.domain_projection(next_);
    check_finite(next_);
    std::copy(next_.begin(), next_.end(), x.begin());
  }

  void euler_random(std::span<double> x, std::size_t regime, double h, RngStream& rng) {
    std::span<double> noise(noise_.data(), model_.noise_dim);
    rng.fill_normal(noise);
    euler(x, regime, h, noise);
  }

  // Draws the regime events of one step from the frozen start state.
  void regime_events(const StateView& x, double dt, double bound, RngStream& rng,
                     std::vector<RegimeEvent>& events) {
    events.clear();
    const std::size_t m = model_.regimes;
    if (m < 2) return;
    model_.switch_rates(x, rates_);
    for (std::size_t i = 0; i < m; ++i) {
      if (std::abs(rates_[i * m + i]) > bound)
        throw Error(ErrorCode::RateBoundViolated,
                    "|q_ii| = " + std::to_string(std::abs(rates_[i * m + i])) +
                        " exceeds max_rate_bound " + std::to_string(bound));
    }
    std::size_t regime = x.regime;
    double clock = 0.0;
    while (true) {
      clock += rng.exponential(bound);
      if (clock >= dt) break;
      const double exit_rate = -rates_[regime * m + regime];
      const double u = rng.uniform();
      if (exit_rate <= 0.0 || u * bound >= exit_rate) continue;
      // Target j != regime with probability q_ij / |q_ii|.
      double pick = rng.uniform() * exit_rate;
      std::size_t target = regime;
      for (std::size_t j = 0; j < m; ++j) {
        if (j == regime) continue;
        const double q = rates_[regime * m + j];
        if (q <= 0.0) continue;
        target = j;
        if (pick < q) break;
        pick -= q;
      }
      if (target == regime) continue;
      regime = target;
      events.push_back({clock, regime});
    }
  }

 private:
  const ModelSpec& model_;
  std::vector<double> drift_;
  std::vector<double> diffusion_;
  std::vector<double> noise_;
  std::vector<double> next_;
  std::vector<double> rates_;
};

void require_family(const ModelSpec& model, Family f, const char* op) {
  if (model.family != f)
    throw Error(ErrorCode::InvalidArgument,
                std::string(op) + " needs a " + family_name(f) + " model, got " +
                    family_name(model.family));
}

void run_chain_step(const ModelSpec& model, std::span<double> z, std::size_t regime,
                    std::vector<double>& noise, std::vector<double>& out, RngStream& rng) {
  if (model.noise_sampler) {
    model.noise_sampler(rng, noise);
  } else {
    rng.fill_normal(noise);
  }
  model.step_map(StateView(z, regime), noise, out);
  if (model.domain_projection) model.domain_projection(out);
  check_finite(out);
  std::copy(out.begin(), out.end(), z.begin());
}

}  // namespace

StateVector em_step(const ModelSpec& model, const StateView& x, double dt,
                    std::span<const double> noise) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  if (model.family == Family::DiscreteChain)
    throw Error(ErrorCode::InvalidArgument, "em_step needs a diffusion model");
  if (noise.size() != model.noise_dim)
    throw Error(ErrorCode::DimensionMismatch, "noise must have noise_dim entries");
  StateVector out = x.to_state();
  Workspace ws(model);
  ws.euler(out.x, out.regime, dt, noise);
  return out;
}

StateVector switch_step(const ModelSpec& model, const StateView& x, double dt, double rate_bound,
                        RngStream& rng, std::vector<RegimeEvent>* events) {
  require_family(model, Family::SwitchingDiffusion, "switch_step");
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  Workspace ws(model);
  std::vector<RegimeEvent> local;
  ws.regime_events(x, dt, rate_bound, rng, local);
  StateVector out = x.to_state();
  double done = 0.0;
  for (const RegimeEvent& ev : local) {
    if (ev.offset > done) ws.euler_random(out.x, out.regime, ev.offset - done, rng);
    done = ev.offset;
    out.regime = ev.regime;
  }
  ws.euler_random(out.x, out.regime, dt - done, rng);
  if (events) events->insert(events->end(), local.begin(), local.end());
  return out;
}

StateVector discrete_step(const ModelSpec& model, const StateView& z, RngStream& rng) {
  require_family(model, Family::DiscreteChain, "discrete_step");
  StateVector out = z.to_state();
  std::vector<double> noise(model.noise_dim);
  std::vector<double> next(model.dim);
  run_chain_step(model, out.x, out.regime, noise, next, rng);
  return out;
}

Trajectory poissonize(const ModelSpec& chain, const StateVector& x0, RngStream& rng,
                      double t_final) {
  require_family(chain, Family::DiscreteChain, "poissonize");
  if (!(t_final > 0.0)) throw Error(ErrorCode::InvalidArgument, "t_final must be positive");
  if (x0.x.size() != chain.dim) throw Error(ErrorCode::DimensionMismatch, "initial state dimension");
  Trajectory path(chain.dim);
  StateVector z = x0;
  std::vector<double> noise(chain.noise_dim);
  std::vector<double> next(chain.dim);
  path.push(0.0, z, false);
  double t = 0.0;
  while (true) {
    t += rng.exponential(1.0);
    if (t >= t_final) break;
    run_chain_step(chain, z.x, z.regime, noise, next, rng);
    path.push(t, z, true);
  }
  path.push(t_final, z, false);
  return path;
}

SimSummary simulate_streaming(const ModelSpec& model, const StateVector& x0, const SimConfig& cfg,
                              RngStream& rng, const PathObserver& observer) {
  cfg.validate();
  validate_model(model);
  if (x0.x.size() != model.dim) throw Error(ErrorCode::DimensionMismatch, "initial state dimension");
  if (x0.regime >= model.regimes) throw Error(ErrorCode::IndexOutOfRange, "initial regime");
  check_finite(x0.x);

  SimSummary summary;
  StateVector state = x0;
  observer(0.0, state, false);
  // Paths started on M0 stay there; only paths started off M0 use the floor.
  const bool use_floor = distance_to_extinction(model, state) >= cfg.floor_epsilon;
  const auto at_floor = [&] {
    return use_floor && distance_to_extinction(model, state) < cfg.floor_epsilon;
  };

  if (model.family == Family::DiscreteChain) {
    const auto n_steps = static_cast<std::size_t>(std::floor(cfg.t_final + 1e-9));
    std::vector<double> noise(model.noise_dim);
    std::vector<double> next(model.dim);
    for (std::size_t n = 1; n <= n_steps; ++n) {
      run_chain_step(model, state.x, state.regime, noise, next, rng);
      ++summary.steps;
      const bool floor_hit = at_floor();
      if (n % cfg.record_every == 0 || n == n_steps || floor_hit)
        observer(static_cast<double>(n), state, true);
      summary.t_end = static_cast<double>(n);
      if (floor_hit) {
        summary.stopped_at_floor = true;
        break;
      }
    }
    return summary;
  }

  Workspace ws(model);
  std::vector<RegimeEvent> events;
  const auto n_steps = static_cast<std::size_t>(std::llround(cfg.t_final / cfg.dt));
  const bool switching = model.family == Family::SwitchingDiffusion && model.regimes > 1;
  double t_prev = 0.0;
  for (std::size_t n = 1; n <= n_steps; ++n) {
    const double t0 = t_prev;
    const double t1 = (n == n_steps) ? cfg.t_final : static_cast<double>(n) * cfg.dt;
    const double h = t1 - t0;
    bool end_is_jump = false;
    if (switching) {
      ws.regime_events(state, h, cfg.max_rate_bound, rng, events);
      double done = 0.0;
      for (const RegimeEvent& ev : events) {
        if (ev.offset > done) ws.euler_random(state.x, state.regime, ev.offset - done, rng);
        done = ev.offset;
        state.regime = ev.regime;
        const double te = t0 + ev.offset;
        if (te > t0 && te < t1) {
          observer(te, state, true);
        } else {
          end_is_jump = true;
        }
      }
      ws.euler_random(state.x, state.regime, h - done, rng);
    } else {
      ws.euler_random(state.x, state.regime, h, rng);
    }
    ++summary.steps;
    t_prev = t1;
    const bool floor_hit = at_floor();
    if (n % cfg.record_every == 0 || n == n_steps || floor_hit || end_is_jump)
      observer(t1, state, end_is_jump);
    summary.t_end = t1;
    if (floor_hit) {
      summary.stopped_at_floor = true;
      break;
    }
  }
  return summary;
}

Trajectory simulate(const ModelSpec& model, const StateVector& x0, const SimConfig& cfg,
                    RngStream& rng) {
  Trajectory path(model.dim);
  const double per_step = model.family == Family::DiscreteChain ? 1.0 : cfg.dt;
  path.reserve(static_cast<std::size_t>(cfg.t_final / per_step / static_cast<double>(cfg.record_every)) + 2);
  const SimSummary s = simulate_streaming(
      model, x0, cfg, rng, [&](double t, const StateView& v, bool jump) { path.push(t, v, jump); });
  path.stopped_at_floor = s.stopped_at_floor;
  return path;
}

}  // namespace extinctd
