// SPDX-License-Identifier: Apache-2.0
#include "extinctd/lyapunov.hpp"

#include <algorithm>
#include <cmath>

#include "extinctd/integrators.hpp"

namespace extinctd {

namespace {

double eval_finite(const Observable& g, const StateView& s, const char* what) {
  const double v = g(s);
  if (!std::isfinite(v))
    throw Error(ErrorCode::NonFiniteObservable, std::string(what) + " is not finite on the path");
  return v;
}

// Integral of g over [t_{k-1}, t_k]: left-constant into jump points.
double segment(const Trajectory& traj, std::size_t k, double g_prev, double g_here) {
  const double h = traj.time(k) - traj.time(k - 1);
  return traj.is_jump(k) ? g_prev * h : 0.5 * (g_prev + g_here) * h;
}

}  // namespace

std::size_t OccupationAccumulator::add(std::string name, Observable g) {
  if (started_) throw Error(ErrorCode::InvalidArgument, "observables must be added before observing");
  names_.push_back(std::move(name));
  fns_.push_back(std::move(g));
  integrals_.push_back(0.0);
  last_values_.push_back(0.0);
  return fns_.size() - 1;
}

void OccupationAccumulator::observe(double t, const StateView& s, bool jump) {
  if (started_ && t < last_t_) throw Error(ErrorCode::InvalidArgument, "observations must be time ordered");
  const std::size_t n = fns_.size();
  if (!started_) {
    for (std::size_t i = 0; i < n; ++i) last_values_[i] = eval_finite(fns_[i], s, names_[i].c_str());
    last_t_ = t;
    started_ = true;
    return;
  }
  const double t0 = last_t_;
  const double h = t - t0;
  if (t <= burn_in_ || h <= 0.0) {
    for (std::size_t i = 0; i < n; ++i) last_values_[i] = eval_finite(fns_[i], s, names_[i].c_str());
    last_t_ = t;
    return;
  }
  const double start = std::max(t0, burn_in_);
  const double width = t - start;
  const double frac = (start - t0) / h;
  for (std::size_t i = 0; i < n; ++i) {
    const double g_prev = last_values_[i];
    const double g_here = eval_finite(fns_[i], s, names_[i].c_str());
    if (jump) {
      integrals_[i] += g_prev * width;
    } else {
      const double g_start = g_prev + (g_here - g_prev) * frac;
      integrals_[i] += 0.5 * (g_start + g_here) * width;
    }
    last_values_[i] = g_here;
  }
  elapsed_ += width;
  last_t_ = t;
}

double OccupationAccumulator::average(std::size_t slot) const {
  if (!(elapsed_ > 0.0)) throw Error(ErrorCode::EmptyWindow, "no time integrated after burn-in");
  return integrals_.at(slot) / elapsed_;
}

std::size_t OccupationAccumulator::slot_of(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw Error(ErrorCode::InvalidArgument, "unknown observable '" + name + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

std::vector<double> running_integral(const Trajectory& traj, const Observable& g) {
  std::vector<double> out(traj.size(), 0.0);
  if (traj.empty()) return out;
  double prev = eval_finite(g, traj.view(0), "observable");
  double acc = 0.0;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const double here = eval_finite(g, traj.view(k), "observable");
    acc += segment(traj, k, prev, here);
    out[k] = acc;
    prev = here;
  }
  return out;
}

std::vector<double> dynkin_residual(const Trajectory& traj, const Observable& f,
                                    const Observable& Lf) {
  std::vector<double> out = running_integral(traj, Lf);
  if (traj.empty()) return out;
  const double f0 = eval_finite(f, traj.view(0), "f");
  for (std::size_t k = 0; k < traj.size(); ++k)
    out[k] = eval_finite(f, traj.view(k), "f") - f0 - out[k];
  return out;
}

std::vector<double> qv_residual(const Trajectory& traj, const Observable& f, const Observable& Lf,
                                const Observable& Gf) {
  std::vector<double> m = dynkin_residual(traj, f, Lf);
  const std::vector<double> q = running_integral(traj, Gf);
  for (std::size_t k = 0; k < m.size(); ++k) m[k] = m[k] * m[k] - q[k];
  return m;
}

double occupation_average(const Trajectory& traj, const Observable& g, double burn_in) {
  if (traj.size() < 2 || !(burn_in < traj.duration()))
    throw Error(ErrorCode::EmptyWindow, "burn-in leaves no time to average over");
  OccupationAccumulator acc(burn_in);
  acc.add("g", g);
  for (std::size_t k = 0; k < traj.size(); ++k) acc.observe(traj.time(k), traj.view(k), traj.is_jump(k));
  return acc.average(0);
}

TightnessReport tightness_check(const Trajectory& traj, const LyapunovSuite& suite, double slack,
                                double tail_fraction) {
  TightnessReport report;
  report.K = suite.K;
  report.slack = slack;
  if (traj.size() < 2) return report;
  const std::vector<double> integral = running_integral(traj, suite.Wprime);
  const double tail_start = traj.duration() * (1.0 - tail_fraction);
  report.tail_max = -HUGE_VAL;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const double mu = integral[k] / traj.time(k);
    report.times.push_back(traj.time(k));
    report.running_average.push_back(mu);
    if (traj.time(k) >= tail_start) report.tail_max = std::max(report.tail_max, mu);
  }
  report.violated = report.tail_max > suite.K + slack;
  return report;
}

GeneratorValue apply_generator(const ModelSpec& model, const Observable& f, const StateView& x,
                               const GeneratorOptions& opts) {
  GeneratorValue out;
  const std::size_t n = model.dim;
  std::vector<double> point(x.x.begin(), x.x.end());
  const auto eval = [&](std::size_t regime) { return f(StateView(point, regime)); };
  const double f0 = eval(x.regime);

  if (model.family == Family::DiscreteChain) {
    RngStream rng(opts.seed, 0);
    std::vector<double> noise(model.noise_dim);
    std::vector<double> next(n);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t s = 0; s < opts.chain_samples; ++s) {
      if (model.noise_sampler) {
        model.noise_sampler(rng, noise);
      } else {
        rng.fill_normal(noise);
      }
      model.step_map(x, noise, next);
      if (model.domain_projection) model.domain_projection(next);
      const double d = f(StateView(next, x.regime)) - f0;
      sum += d;
      sum_sq += d * d;
    }
    const double count = static_cast<double>(opts.chain_samples);
    out.Lf = sum / count;
    out.gamma = sum_sq / count;
    return out;
  }

  std::vector<double> drift(n);
  model.drift(x, drift);
  const std::size_t d = model.noise_dim;
  std::vector<double> sigma(n * d);
  if (d > 0) model.diffusion(x, sigma);
  // Sigma = sigma sigma^T
  std::vector<double> cov(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += sigma[i * d + k] * sigma[j * d + k];
      cov[i * n + j] = acc;
    }

  // Steps shrink near M0, where V-type functions are singular.
  double scale = model.extinction_distance(x);
  if (!(scale > 0.0 && scale < 1.0)) scale = 1.0;

  std::vector<double> grad(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double h = 1e-5 * (scale + std::abs(x.x[i]));
    point[i] = x.x[i] + h;
    const double up = eval(x.regime);
    point[i] = x.x[i] - h;
    const double down = eval(x.regime);
    point[i] = x.x[i];
    grad[i] = (up - down) / (2.0 * h);
  }

  double second = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double c = cov[i * n + j];
      if (c == 0.0) continue;
      const double hi = 1e-4 * (scale + std::abs(x.x[i]));
      double dij;
      if (i == j) {
        point[i] = x.x[i] + hi;
        const double up = eval(x.regime);
        point[i] = x.x[i] - hi;
        const double down = eval(x.regime);
        point[i] = x.x[i];
        dij = (up - 2.0 * f0 + down) / (hi * hi);
        second += 0.5 * c * dij;
      } else {
        const double hj = 1e-4 * (scale + std::abs(x.x[j]));
        double corners[4];
        const double si[4] = {1, 1, -1, -1};
        const double sj[4] = {1, -1, 1, -1};
        for (int q = 0; q < 4; ++q) {
          point[i] = x.x[i] + si[q] * hi;
          point[j] = x.x[j] + sj[q] * hj;
          corners[q] = eval(x.regime);
        }
        point[i] = x.x[i];
        point[j] = x.x[j];
        dij = (corners[0] - corners[1] - corners[2] + corners[3]) / (4.0 * hi * hj);
        second += c * dij;  // symmetric pair (i,j) and (j,i)
      }
    }
  }

  double first = 0.0;
  for (std::size_t i = 0; i < n; ++i) first += drift[i] * grad[i];
  double gamma = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) gamma += cov[i * n + j] * grad[i] * grad[j];

  if (model.family == Family::SwitchingDiffusion && model.regimes > 1) {
    const std::size_t m = model.regimes;
    std::vector<double> q(m * m);
    model.switch_rates(x, q);
    for (std::size_t b = 0; b < m; ++b) {
      if (b == x.regime) continue;
      const double diff = eval(b) - f0;
      first += q[x.regime * m + b] * diff;
      gamma += q[x.regime * m + b] * diff * diff;
    }
  }
  out.Lf = first + second;
  out.gamma = gamma;
  return out;
}

DiagnosticsReport suite_diagnostics(const ModelSpec& model, const LyapunovSuite& suite,
                                    const std::vector<StateVector>& sample_points,
                                    const GeneratorOptions& opts) {
  DiagnosticsReport r;
  for (const StateVector& p : sample_points) {
    const StateView x(p);
    double lw;
    double gw;
    if (suite.LW && suite.gammaW) {
      lw = suite.LW(x);
      gw = suite.gammaW(x);
    } else {
      const GeneratorValue g = apply_generator(model, suite.W, x, opts);
      lw = suite.LW ? suite.LW(x) : g.Lf;
      gw = suite.gammaW ? suite.gammaW(x) : g.gamma;
    }
    const double lu = suite.LU ? suite.LU(x) : apply_generator(model, suite.U, x, opts).Lf;
    const double uprime = suite.Uprime(x);
    r.lw_violation = std::max(r.lw_violation, lw - (suite.K - suite.Wprime(x)));
    r.lu_violation = std::max(r.lu_violation, lu - (suite.K - uprime));
    r.gamma_w_violation = std::max(r.gamma_w_violation, gw - suite.K * uprime);
    if (distance_to_extinction(model, x) > 0.0 && suite.gammaV)
      r.gamma_v_violation = std::max(r.gamma_v_violation, suite.gammaV(x) - suite.K * uprime);
    ++r.points;
  }
  // Suites that define W' = K - LW hit the bound exactly; allow rounding.
  const double tol = 1e-9 * std::max(1.0, suite.K);
  r.passed = r.points > 0 && r.lw_violation <= tol && r.lu_violation <= tol &&
             r.gamma_w_violation <= tol && r.gamma_v_violation <= tol;
  return r;
}

std::vector<double> vanishing_trend(const LyapunovSuite& suite,
                                    const std::vector<std::vector<StateVector>>& shells) {
  std::vector<double> out;
  out.reserve(shells.size());
  for (const auto& shell : shells) {
    double worst = 0.0;
    for (const StateVector& p : shell) worst = std::max(worst, std::abs(suite.LV(p)) / suite.Wprime(p));
    out.push_back(worst);
  }
  return out;
}

StrongLawReport strong_law_check(const std::vector<Trajectory>& replicas, const Observable& f,
                                 const Observable& Lf, const std::vector<double>& horizons) {
  if (replicas.size() < 30) throw Error(ErrorCode::InvalidArgument, "strong-law check needs >= 30 replicas");
  if (horizons.empty()) throw Error(ErrorCode::InvalidArgument, "no horizons given");
  StrongLawReport report;
  report.horizons = horizons;
  std::vector<std::vector<double>> per_horizon(horizons.size());
  for (const Trajectory& traj : replicas) {
    const std::vector<double> m = dynkin_residual(traj, f, Lf);
    for (std::size_t h = 0; h < horizons.size(); ++h) {
      const double T = horizons[h];
      if (traj.duration() < T * (1.0 - 1e-12))
        throw Error(ErrorCode::InvalidArgument, "replica ends before horizon");
      // Last grid point at or before T.
      auto it = std::upper_bound(traj.times().begin(), traj.times().end(), T * (1.0 + 1e-12));
      const std::size_t k = static_cast<std::size_t>(it - traj.times().begin()) - 1;
      per_horizon[h].push_back(std::abs(m[k]) / T);
    }
  }
  for (const auto& vals : per_horizon) {
    double mx = 0.0;
    double ss = 0.0;
    for (double v : vals) {
      mx = std::max(mx, v);
      ss += v * v;
    }
    report.max_ratio.push_back(mx);
    report.rms_ratio.push_back(std::sqrt(ss / static_cast<double>(vals.size())));
  }
  report.shrinking = true;
  for (std::size_t h = 1; h < horizons.size(); ++h) {
    const double prev = report.max_ratio[h - 1];
    const double here = report.max_ratio[h];
    const double ratio = prev > 0.0 ? here / prev : 0.0;
    report.shrink.push_back(ratio);
    const bool negligible = here < 1e-9;
    if (!negligible && !(ratio < 0.8)) report.shrinking = false;
  }
  return report;
}

}  // namespace extinctd
