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

struct SisData {
  std::size_t n = 0;
  std::size_t m = 1;
  std::vector<Eigen::MatrixXd> A;
  std::vector<double> beta;
  std::vector<double> delta;
  std::vector<double> kappa;
  std::vector<double> q;  // row-major
};

// b_i(u, s) = (A(s) u)_i
double neighbour_sum(const SisData& d, std::size_t s, std::span<const double> u, std::size_t i) {
  double b = 0.0;
  for (std::size_t j = 0; j < d.n; ++j) b += at(d.A[s], i, j) * u[j];
  return b;
}

// Polar quantities at (v, r): a_i = F_i / r and c_i = diffusion_i / r.
void polar_terms(const SisData& d, std::span<const double> v, double r, std::size_t s,
                 std::span<double> a, std::span<double> c) {
  for (std::size_t i = 0; i < d.n; ++i) {
    const double b = neighbour_sum(d, s, v, i);
    const double healthy = 1.0 - r * v[i];
    a[i] = d.beta[s] * b * healthy - d.delta[s] * v[i];
    c[i] = d.kappa[s] * v[i] * r * b * healthy;
  }
}

double polar_H(const SisData& d, std::span<const double> v, double r, std::size_t s) {
  std::vector<double> a(d.n), c(d.n);
  polar_terms(d, v, r, s, a, c);
  double h = 0.0;
  for (std::size_t i = 0; i < d.n; ++i) h += -v[i] * a[i] + 0.5 * c[i] * c[i] * (2.0 * v[i] * v[i] - 1.0);
  return h;
}

double polar_gammaV(const SisData& d, std::span<const double> v, double r, std::size_t s) {
  std::vector<double> a(d.n), c(d.n);
  polar_terms(d, v, r, s, a, c);
  double g = 0.0;
  for (std::size_t i = 0; i < d.n; ++i) g += v[i] * v[i] * c[i] * c[i];
  return g;
}

// Splits x into (v, r); v is left at zero when x = 0.
double to_polar(std::span<const double> x, std::span<double> v) {
  const double r = detail::norm2(x);
  for (std::size_t i = 0; i < x.size(); ++i) v[i] = r > 0.0 ? x[i] / r : 0.0;
  return r;
}

void project_sphere(std::span<double> v) {
  for (double& e : v) e = std::max(e, 0.0);
  const double nv = detail::norm2(v);
  if (nv > 0.0)
    for (double& e : v) e /= nv;
}

void validate(const SisParams& p, SisData& d) {
  if (p.adjacency.empty()) throw Error(ErrorCode::MissingField, "SIS needs an adjacency matrix");
  d.n = static_cast<std::size_t>(p.adjacency.front().rows());
  if (d.n == 0) throw Error(ErrorCode::InvalidAdjacency, "adjacency matrix is empty");
  if (p.Q.rows() != p.Q.cols()) throw Error(ErrorCode::InvalidRateMatrix, "Q must be square");
  d.m = static_cast<std::size_t>(p.Q.rows());
  if (d.m == 0) throw Error(ErrorCode::InvalidRateMatrix, "Q is empty");
  d.q.resize(d.m * d.m);
  for (std::size_t i = 0; i < d.m; ++i)
    for (std::size_t j = 0; j < d.m; ++j) d.q[i * d.m + j] = at(p.Q, i, j);
  check_rate_matrix(d.q, d.m);

  if (p.adjacency.size() == 1) {
    d.A.assign(d.m, p.adjacency.front());
  } else if (p.adjacency.size() == d.m) {
    d.A = p.adjacency;
  } else {
    throw Error(ErrorCode::DimensionMismatch, "need one adjacency matrix or one per regime");
  }
  for (const Eigen::MatrixXd& a : d.A) {
    if (static_cast<std::size_t>(a.rows()) != d.n || static_cast<std::size_t>(a.cols()) != d.n)
      throw Error(ErrorCode::InvalidAdjacency, "adjacency matrices must all be n x n");
    for (std::size_t i = 0; i < d.n; ++i)
      for (std::size_t j = 0; j < d.n; ++j) {
        const double e = at(a, i, j);
        if (e != 0.0 && e != 1.0)
          throw Error(ErrorCode::InvalidAdjacency, "adjacency entries must be 0 or 1");
        if (e != at(a, j, i)) throw Error(ErrorCode::InvalidAdjacency, "adjacency must be symmetric");
      }
  }
  d.beta = detail::broadcast(p.beta, d.m, "beta");
  d.delta = detail::broadcast(p.delta, d.m, "delta");
  d.kappa = detail::broadcast(p.kappa.empty() ? std::vector<double>{0.0} : p.kappa, d.m, "kappa");
  for (std::size_t s = 0; s < d.m; ++s) {
    if (!(d.beta[s] > 0.0) || !(d.delta[s] > 0.0))
      throw Error(ErrorCode::NegativeRate, "beta and delta must be positive");
    if (!(d.kappa[s] >= 0.0)) throw Error(ErrorCode::NegativeParameter, "kappa must be >= 0");
  }
}

}  // namespace

ModelBundle make_sis(const SisParams& params) {
  auto data = std::make_shared<SisData>();
  validate(params, *data);
  std::shared_ptr<const SisData> d = data;
  const std::size_t n = d->n;

  const RatesFn rates = [d](const StateView&, std::span<double> out) {
    std::copy(d->q.begin(), d->q.end(), out.begin());
  };

  ModelBundle b;
  ModelSpec& m = b.model;
  m.name = "sis";
  m.family = Family::SwitchingDiffusion;
  m.dim = n;
  m.noise_dim = n;
  m.regimes = d->m;
  m.constant_rates = true;
  m.switch_rates = rates;
  m.drift = [d](const StateView& x, std::span<double> out) {
    const std::size_t s = x.regime;
    for (std::size_t i = 0; i < d->n; ++i)
      out[i] = d->beta[s] * neighbour_sum(*d, s, x.x, i) * (1.0 - x.x[i]) - d->delta[s] * x.x[i];
  };
  m.diffusion = [d](const StateView& x, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    const std::size_t s = x.regime;
    for (std::size_t i = 0; i < d->n; ++i)
      out[i * d->n + i] = d->kappa[s] * x.x[i] * neighbour_sum(*d, s, x.x, i) * (1.0 - x.x[i]);
  };
  m.domain_projection = [](std::span<double> x) {
    for (double& e : x) e = std::clamp(e, 0.0, 1.0);
  };
  m.extinction_distance = [](const StateView& x) { return detail::norm2(x.x); };

  // Blown-up coordinates (v_1..v_n, r) with x = r v.
  QuadrupleMap q;
  ModelSpec& y = q.blown_up;
  y.name = "sis-polar";
  y.family = Family::SwitchingDiffusion;
  y.dim = n + 1;
  y.noise_dim = n;
  y.regimes = d->m;
  y.constant_rates = true;
  y.switch_rates = rates;
  y.drift = [d](const StateView& z, std::span<double> out) {
    const std::size_t n = d->n;
    const auto v = z.x.first(n);
    const double r = z.x[n];
    std::vector<double> a(n), c(n);
    polar_terms(*d, v, r, z.regime, a, c);
    double s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s1 += v[i] * a[i];
      s2 += 0.5 * (1.0 - v[i] * v[i]) * c[i] * c[i];
      s3 += v[i] * v[i] * c[i] * c[i];
    }
    for (std::size_t i = 0; i < n; ++i)
      out[i] = a[i] - v[i] * c[i] * c[i] + v[i] * (-s1 - s2 + s3);
    out[n] = r * (s1 + s2);
  };
  y.diffusion = [d](const StateView& z, std::span<double> out) {
    const std::size_t n = d->n;
    const auto v = z.x.first(n);
    const double r = z.x[n];
    std::vector<double> a(n), c(n);
    polar_terms(*d, v, r, z.regime, a, c);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) out[i * n + k] = (i == k ? c[i] : 0.0) - v[i] * v[k] * c[k];
    for (std::size_t k = 0; k < n; ++k) out[n * n + k] = r * v[k] * c[k];
  };
  y.domain_projection = [n](std::span<double> z) {
    project_sphere(z.first(n));
    z[n] = std::max(z[n], 0.0);
  };
  y.extinction_distance = [n](const StateView& z) { return z.x[n]; };
  q.forward = [n](std::span<const double> z, std::span<double> x) {
    for (std::size_t i = 0; i < n; ++i) x[i] = z[n] * z[i];
  };
  q.lift = [n](std::span<const double> x, std::span<double> z) { z[n] = to_polar(x, z.first(n)); };
  q.boundary_preimage = "{r = 0} x S^{n-1}_+ x regimes";
  b.map = std::move(q);

  // Boundary: the sphere process at r = 0 (noise vanishes there).
  ModelSpec& bd = b.boundary;
  bd.name = "sis-boundary";
  bd.family = Family::SwitchingDiffusion;
  bd.dim = n;
  bd.noise_dim = 0;
  bd.regimes = d->m;
  bd.constant_rates = true;
  bd.switch_rates = rates;
  bd.drift = [d](const StateView& z, std::span<double> out) {
    const std::size_t s = z.regime;
    double vav = 0.0;
    for (std::size_t i = 0; i < d->n; ++i) {
      out[i] = neighbour_sum(*d, s, z.x, i);
      vav += z.x[i] * out[i];
    }
    for (std::size_t i = 0; i < d->n; ++i) out[i] = d->beta[s] * (out[i] - z.x[i] * vav);
  };
  bd.domain_projection = [](std::span<double> v) { project_sphere(v); };
  bd.extinction_distance = [](const StateView&) { return 1.0; };
  b.boundary_H = [d](const StateView& z) {
    const std::size_t s = z.regime;
    double vav = 0.0;
    for (std::size_t i = 0; i < d->n; ++i) vav += z.x[i] * neighbour_sum(*d, s, z.x, i);
    return d->delta[s] - d->beta[s] * vav;
  };
  {
    std::vector<double> e0(n, 0.0), ones(n, 1.0 / std::sqrt(static_cast<double>(n)));
    e0[0] = 1.0;
    b.boundary_ics = {StateVector{ones, 0}, StateVector{e0, 0}};
  }

  std::size_t max_degree = 0;
  for (const Eigen::MatrixXd& a : d->A)
    max_degree = std::max(max_degree, static_cast<std::size_t>(a.rowwise().sum().maxCoeff()));
  const double kappa_max = *std::max_element(d->kappa.begin(), d->kappa.end());
  LyapunovSuite& suite = b.suite;
  suite = detail::constant_suite(1.0 + kappa_max * kappa_max * static_cast<double>(max_degree * max_degree));
  suite.V = [](const StateView& x) {
    double s = 0.0;
    for (double e : x.x) s += e * e;
    return -0.5 * std::log(s);
  };
  suite.H = [d](const StateView& z) { return polar_H(*d, z.x.first(d->n), z.x[d->n], z.regime); };
  suite.LV = [d](const StateView& x) {
    std::vector<double> v(d->n);
    const double r = to_polar(x.x, v);
    return polar_H(*d, v, r, x.regime);
  };
  suite.gammaV = [d](const StateView& x) {
    std::vector<double> v(d->n);
    const double r = to_polar(x.x, v);
    return polar_gammaV(*d, v, r, x.regime);
  };

  std::vector<double> lambda1(d->m);
  for (std::size_t s = 0; s < d->m; ++s) lambda1[s] = top_eigenvalue(d->A[s]).value;
  std::vector<double> rho(1, 1.0);
  if (d->m > 1) {
    const CtmcGenerator gen(params.Q);
    if (gen.irreducible()) {
      const Eigen::VectorXd r = ctmc_stationary(gen);
      rho.assign(r.data(), r.data() + r.size());
    }
  }
  if (rho.size() == d->m) {
    suite.alpha_candidate = sis_extinction_index(d->delta, d->beta, lambda1, rho);
    b.reference.emplace_back("extinction_index", suite.alpha_candidate);
    for (std::size_t s = 0; s < d->m; ++s)
      b.reference.emplace_back("rho_" + std::to_string(s), rho[s]);
  }
  for (std::size_t s = 0; s < d->m; ++s)
    b.reference.emplace_back("lambda1_" + std::to_string(s), lambda1[s]);
  return b;
}

}  // namespace extinctd
