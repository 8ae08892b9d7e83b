// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <memory>

#include "extinctd/criteria.hpp"
#include "extinctd/models.hpp"
#include "model_util.hpp"

namespace extinctd {

namespace {

using detail::at;

double min_coord(const StateView& s) { return *std::min_element(s.x.begin(), s.x.end()); }

Observable weighted_log_V(std::vector<double> p) {
  return [p = std::move(p)](const StateView& s) {
    double v = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) v -= p[i] * std::log(s.x[i]);
    return v;
  };
}

std::vector<double> weights_or_ones(const std::vector<double>& p, std::size_t n) {
  if (p.empty()) return std::vector<double>(n, 1.0);
  if (p.size() != n) throw Error(ErrorCode::DimensionMismatch, "weights p must have one entry per species");
  for (double w : p)
    if (!(w > 0.0)) throw Error(ErrorCode::NegativeParameter, "weights p must be positive");
  return p;
}

// Frozen inner noise draws shared by every H_i evaluation, so H is a
// deterministic function of the state.
struct EcoData {
  std::size_t n = 0;
  std::size_t noise_dim = 0;
  GrowthFn F;
  std::vector<double> p;
  std::vector<double> draws;  // samples x noise_dim
  std::size_t samples = 0;

  // E[log F_i(z, xi)] for every i, and E[(sum p_i log F_i)^2].
  void log_moments(const StateView& z, std::span<double> mean_log, double* second) const {
    std::vector<double> f(n);
    std::fill(mean_log.begin(), mean_log.end(), 0.0);
    double sq = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
      F(z, std::span<const double>(draws.data() + k * noise_dim, noise_dim), f);
      double w = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!(f[i] > 0.0)) throw Error(ErrorCode::NonPositiveF, "growth factor F must be positive");
        const double lf = std::log(f[i]);
        mean_log[i] += lf;
        w += p[i] * lf;
      }
      sq += w * w;
    }
    for (double& v : mean_log) v /= static_cast<double>(samples);
    if (second) *second = sq / static_cast<double>(samples);
  }
};

}  // namespace

ModelBundle make_ecological_discrete(const EcoDiscreteParams& params) {
  if (params.n_species == 0) throw Error(ErrorCode::DimensionMismatch, "need at least one species");
  if (!params.F) throw Error(ErrorCode::MissingField, "growth factor F is required");
  if (params.inner_samples == 0) throw Error(ErrorCode::InvalidArgument, "inner_samples must be >= 1");
  if (!(params.rho >= 0.0 && params.rho < 1.0))
    throw Error(ErrorCode::InvalidArgument, "rho must lie in [0, 1)");
  const std::size_t n = params.n_species;

  auto data = std::make_shared<EcoData>();
  data->n = n;
  data->noise_dim = params.noise_dim;
  data->F = params.F;
  data->p = weights_or_ones(params.p, n);
  {
    const std::size_t half = params.antithetic ? (params.inner_samples + 1) / 2 : params.inner_samples;
    data->samples = params.antithetic ? 2 * half : half;
    data->draws.resize(data->samples * params.noise_dim);
    RngStream rng(params.inner_seed, 0);
    std::vector<double> xi(params.noise_dim);
    for (std::size_t k = 0; k < half; ++k) {
      if (params.noise) {
        params.noise(rng, xi);
      } else {
        rng.fill_normal(xi);
      }
      const std::size_t row = params.antithetic ? 2 * k : k;
      std::copy(xi.begin(), xi.end(), data->draws.begin() + static_cast<std::ptrdiff_t>(row * params.noise_dim));
      if (params.antithetic)
        for (std::size_t j = 0; j < params.noise_dim; ++j)
          data->draws[(row + 1) * params.noise_dim + j] = -xi[j];
    }
  }
  std::shared_ptr<const EcoData> d = data;

  ModelBundle b;
  ModelSpec& m = b.model;
  m.name = "eco-discrete";
  m.family = Family::DiscreteChain;
  m.dim = n;
  m.noise_dim = params.noise_dim;
  m.noise_sampler = params.noise;
  m.step_map = [F = params.F](const StateView& z, std::span<const double> xi, std::span<double> out) {
    F(z, xi, out);
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (!(out[i] > 0.0)) throw Error(ErrorCode::NonPositiveF, "growth factor F must be positive");
      out[i] *= z.x[i];
    }
  };
  m.extinction_distance = min_coord;
  b.boundary = m;

  for (std::size_t i = 0; i < n; ++i)
    b.species_H.push_back([d, i](const StateView& z) {
      std::vector<double> ml(d->n);
      d->log_moments(z, ml, nullptr);
      return -ml[i];
    });

  LyapunovSuite& suite = b.suite;
  suite.V = weighted_log_V(d->p);
  suite.H = [d](const StateView& z) {
    std::vector<double> ml(d->n);
    d->log_moments(z, ml, nullptr);
    double h = 0.0;
    for (std::size_t i = 0; i < d->n; ++i) h -= d->p[i] * ml[i];
    return h;
  };
  suite.LV = suite.H;
  suite.gammaV = [d](const StateView& z) {
    std::vector<double> ml(d->n);
    double second = 0.0;
    d->log_moments(z, ml, &second);
    return second;
  };
  b.boundary_H = suite.H;
  b.boundary_ics = {StateVector{std::vector<double>(n, 0.0), 0}};

  const Observable upsilon = params.upsilon ? params.upsilon : [](const StateView& z) {
    double s = 1.0;
    for (double v : z.x) s += v;
    return s;
  };
  const double shrink = 1.0 - params.rho * params.rho;
  suite.W = suite.U = [upsilon, shrink](const StateView& z) { return upsilon(z) / shrink; };
  suite.Wprime = suite.Uprime = upsilon;
  suite.K = std::max(1.0, params.C2 / shrink);

  const StateVector origin{std::vector<double>(n, 0.0), 0};
  suite.alpha_candidate = suite.H(origin);
  for (std::size_t i = 0; i < n; ++i)
    b.reference.emplace_back("invasion_rate_origin_" + std::to_string(i), -b.species_H[i](origin));
  return b;
}

ModelBundle make_ricker(const std::vector<double>& r, const Eigen::MatrixXd& B,
                        const std::vector<double>& sigma, std::vector<double> p,
                        std::size_t inner_samples) {
  const std::size_t n = r.size();
  if (n == 0) throw Error(ErrorCode::DimensionMismatch, "r must not be empty");
  if (static_cast<std::size_t>(B.rows()) != n || static_cast<std::size_t>(B.cols()) != n)
    throw Error(ErrorCode::DimensionMismatch, "B must be n x n");
  const std::vector<double> sg = detail::broadcast(sigma, n, "sigma");
  double C2 = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(sg[i] >= 0.0)) throw Error(ErrorCode::NegativeParameter, "sigma must be >= 0");
    if (!(at(B, i, i) > 0.0)) throw Error(ErrorCode::NegativeParameter, "B must have a positive diagonal");
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && at(B, i, j) < 0.0)
        throw Error(ErrorCode::NegativeParameter, "off-diagonal B entries must be >= 0");
    // sup_x x e^{r - B_ii x} E[e^{sigma xi}] bounds P(1 + sum x) - 1.
    C2 += std::exp(r[i] + 0.5 * sg[i] * sg[i] - 1.0) / at(B, i, i);
  }
  EcoDiscreteParams e;
  e.n_species = n;
  e.noise_dim = n;
  e.p = std::move(p);
  e.inner_samples = inner_samples;
  e.rho = 0.0;
  e.C2 = C2;
  e.F = [r, B, sg](const StateView& z, std::span<const double> xi, std::span<double> out) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      double bx = 0.0;
      for (std::size_t j = 0; j < r.size(); ++j) bx += at(B, i, j) * z.x[j];
      out[i] = std::exp(r[i] - bx + sg[i] * xi[i]);
    }
  };
  ModelBundle bundle = make_ecological_discrete(e);
  bundle.model.name = "eco-discrete";
  return bundle;
}

ModelBundle make_kolmogorov(const KolmogorovParams& params) {
  const std::size_t n = params.r.size();
  if (n == 0) throw Error(ErrorCode::DimensionMismatch, "r must not be empty");
  if (static_cast<std::size_t>(params.B.rows()) != n || static_cast<std::size_t>(params.B.cols()) != n)
    throw Error(ErrorCode::DimensionMismatch, "B must be n x n");
  const std::vector<double> g = detail::broadcast(params.g, n, "g");
  const Eigen::MatrixXd A = params.A.size() == 0 ? Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) : params.A;
  if (static_cast<std::size_t>(A.cols()) != n)
    throw Error(ErrorCode::DimensionMismatch, "noise matrix A must have n columns");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(at(params.B, i, i) > 0.0)) throw Error(ErrorCode::NegativeParameter, "B must have a positive diagonal");
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && at(params.B, i, j) < 0.0)
        throw Error(ErrorCode::NegativeParameter, "off-diagonal B entries must be >= 0");
  }
  const std::vector<double> p = weights_or_ones(params.p, n);
  const std::vector<double> r = params.r;
  const Eigen::MatrixXd B = params.B;
  const Eigen::MatrixXd Sigma = A.transpose() * A;
  const std::size_t k = static_cast<std::size_t>(A.rows());

  const ComponentFn f = [r, B](const StateView& x, std::size_t i) {
    double bx = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) bx += at(B, i, j) * x.x[j];
    return r[i] - bx;
  };
  const ComponentFn gf = [g](const StateView&, std::size_t i) { return g[i]; };

  ModelBundle b;
  ModelSpec& m = b.model;
  m.name = "kolmogorov";
  m.family = Family::Sde;
  m.dim = n;
  m.noise_dim = k;
  m.drift = [f, n](const StateView& x, std::span<double> out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x.x[i] * f(x, i);
  };
  m.diffusion = [g, A, n, k](const StateView& x, std::span<double> out) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < k; ++c) out[i * k + c] = x.x[i] * g[i] * at(A, c, i);
  };
  m.domain_projection = [](std::span<double> x) {
    for (double& e : x) e = std::max(e, 0.0);
  };
  m.extinction_distance = min_coord;
  b.boundary = m;

  for (std::size_t i = 0; i < n; ++i) b.species_H.push_back(kolmogorov_H(f, gf, Sigma, i));
  LyapunovSuite& suite = b.suite;
  suite.V = weighted_log_V(p);
  suite.H = [hs = b.species_H, p](const StateView& x) {
    double h = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) h += p[i] * hs[i](x);
    return h;
  };
  suite.LV = suite.H;
  double gv = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) gv += p[i] * p[j] * g[i] * g[j] * at(Sigma, i, j);
  suite.gammaV = [gv](const StateView&) { return gv; };
  b.boundary_H = suite.H;
  b.boundary_ics = {StateVector{std::vector<double>(n, 0.0), 0}};

  // W = W' = 1 + sum x, U = U' = (1 + sum x)^2, with K from a grid scan.
  const auto total = [](const StateView& x) {
    double s = 1.0;
    for (double v : x.x) s += v;
    return s;
  };
  const auto drift_sum = [f, n](const StateView& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x.x[i] * f(x, i);
    return s;
  };
  const auto gamma_w = [g, Sigma, n](const StateView& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) s += x.x[i] * g[i] * at(Sigma, i, j) * x.x[j] * g[j];
    return s;
  };
  suite.W = suite.Wprime = total;
  suite.U = suite.Uprime = [total](const StateView& x) { return total(x) * total(x); };
  suite.LW = drift_sum;
  suite.LU = [total, drift_sum, gamma_w](const StateView& x) {
    return 2.0 * total(x) * drift_sum(x) + gamma_w(x);
  };
  suite.gammaW = gamma_w;

  double reach = 2.0;
  for (std::size_t i = 0; i < n; ++i)
    reach = std::max(reach, 4.0 * (std::abs(r[i]) + 2.0 + g[i] * g[i] * at(Sigma, i, i)) / at(B, i, i) + 2.0);
  double sup = gv;
  std::vector<double> pt(n);
  const StateView view(pt, 0);
  const auto visit = [&] {
    const double u = suite.U(view);
    sup = std::max({sup, suite.LW(view) + suite.Wprime(view), suite.LU(view) + u, gamma_w(view) / u, gv / u});
  };
  if (n <= 3) {
    const std::size_t per = n == 1 ? 2000 : (n == 2 ? 200 : 40);
    std::vector<std::size_t> idx(n, 0);
    while (true) {
      for (std::size_t i = 0; i < n; ++i) pt[i] = reach * static_cast<double>(idx[i]) / static_cast<double>(per);
      visit();
      std::size_t c = 0;
      while (c < n && ++idx[c] > per) idx[c++] = 0;
      if (c == n) break;
    }
  } else {
    RngStream rng(0x6b6f6cULL, 0);
    for (int s = 0; s < 50000; ++s) {
      for (std::size_t i = 0; i < n; ++i) pt[i] = reach * rng.uniform();
      visit();
    }
  }
  suite.K = 1.2 * sup + 1.0;

  const StateVector origin{std::vector<double>(n, 0.0), 0};
  suite.alpha_candidate = suite.H(origin);
  for (std::size_t i = 0; i < n; ++i)
    b.reference.emplace_back("H_origin_" + std::to_string(i), b.species_H[i](origin));
  return b;
}

}  // namespace extinctd
