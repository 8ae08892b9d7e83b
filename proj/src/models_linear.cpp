// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "extinctd/criteria.hpp"
#include "extinctd/models.hpp"
#include "model_util.hpp"

namespace extinctd {

namespace {

struct LinearData {
  std::size_t n = 0;
  Eigen::MatrixXd A;
  Eigen::MatrixXd S;

  // v^T A v, |S v|^2, eta = v^T S v; also fills Av and Sv.
  void terms(std::span<const double> v, std::span<double> Av, std::span<double> Sv, double& vAv,
             double& s2, double& eta) const {
    vAv = s2 = eta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double a = 0.0, s = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        a += detail::at(A, i, j) * v[j];
        s += detail::at(S, i, j) * v[j];
      }
      Av[i] = a;
      Sv[i] = s;
      vAv += v[i] * a;
      s2 += s * s;
      eta += v[i] * s;
    }
  }

  // H(v) = -v^T A v - |Sv|^2 / 2 + (v^T S v)^2
  double H(std::span<const double> v) const {
    std::vector<double> Av(n), Sv(n);
    double vAv, s2, eta;
    terms(v, Av, Sv, vAv, s2, eta);
    return -vAv - 0.5 * s2 + eta * eta;
  }

  // Sphere drift f(v) and diffusion sigma(v); returns the radial rate g(v).
  double sphere(std::span<const double> v, std::span<double> f, std::span<double> sig,
                double* eta_out) const {
    std::vector<double> Av(n), Sv(n);
    double vAv, s2, eta;
    terms(v, Av, Sv, vAv, s2, eta);
    const double g = vAv + 0.5 * (s2 - eta * eta);
    for (std::size_t i = 0; i < n; ++i) {
      f[i] = Av[i] - v[i] * g + v[i] * eta * eta - eta * Sv[i];
      sig[i] = Sv[i] - eta * v[i];
    }
    if (eta_out) *eta_out = eta;
    return g;
  }
};

void normalize(std::span<double> v) {
  const double nv = detail::norm2(v);
  if (nv > 0.0)
    for (double& e : v) e /= nv;
}

}  // namespace

ModelBundle make_linear_sde(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Sigma) {
  if (A.rows() != A.cols()) throw Error(ErrorCode::NonSquare, "A must be square");
  if (Sigma.rows() != Sigma.cols()) throw Error(ErrorCode::NonSquare, "Sigma must be square");
  if (A.rows() != Sigma.rows()) throw Error(ErrorCode::DimensionMismatch, "A and Sigma must have the same size");
  if (A.rows() == 0) throw Error(ErrorCode::DimensionMismatch, "A must not be empty");
  auto data = std::make_shared<LinearData>();
  data->n = static_cast<std::size_t>(A.rows());
  data->A = A;
  data->S = Sigma;
  std::shared_ptr<const LinearData> d = data;
  const std::size_t n = d->n;

  ModelBundle b;
  ModelSpec& m = b.model;
  m.name = "linear";
  m.family = Family::Sde;
  m.dim = n;
  m.noise_dim = 1;
  m.drift = [d](const StateView& x, std::span<double> out) {
    for (std::size_t i = 0; i < d->n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < d->n; ++j) s += detail::at(d->A, i, j) * x.x[j];
      out[i] = s;
    }
  };
  m.diffusion = [d](const StateView& x, std::span<double> out) {
    for (std::size_t i = 0; i < d->n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < d->n; ++j) s += detail::at(d->S, i, j) * x.x[j];
      out[i] = s;
    }
  };
  m.extinction_distance = [](const StateView& x) { return detail::norm2(x.x); };

  // Polar coordinates (v, r), x = r v.
  QuadrupleMap q;
  ModelSpec& y = q.blown_up;
  y.name = "linear-polar";
  y.family = Family::Sde;
  y.dim = n + 1;
  y.noise_dim = 1;
  y.drift = [d](const StateView& z, std::span<double> out) {
    std::vector<double> sig(d->n);
    const double g = d->sphere(z.x.first(d->n), out.first(d->n), sig, nullptr);
    out[d->n] = z.x[d->n] * g;
  };
  y.diffusion = [d](const StateView& z, std::span<double> out) {
    std::vector<double> f(d->n);
    double eta = 0.0;
    d->sphere(z.x.first(d->n), f, out.first(d->n), &eta);
    out[d->n] = z.x[d->n] * eta;
  };
  y.domain_projection = [n](std::span<double> z) { normalize(z.first(n)); };
  y.extinction_distance = [n](const StateView& z) { return std::abs(z.x[n]); };
  q.forward = [n](std::span<const double> z, std::span<double> x) {
    for (std::size_t i = 0; i < n; ++i) x[i] = z[n] * z[i];
  };
  q.lift = [n](std::span<const double> x, std::span<double> z) {
    const double r = detail::norm2(x);
    for (std::size_t i = 0; i < n; ++i) z[i] = r > 0.0 ? x[i] / r : 0.0;
    z[n] = r;
  };
  q.boundary_preimage = "{r = 0} x S^{n-1}";
  b.map = std::move(q);

  ModelSpec& bd = b.boundary;
  bd.name = "linear-sphere";
  bd.family = Family::Sde;
  bd.dim = n;
  bd.noise_dim = 1;
  bd.drift = [d](const StateView& v, std::span<double> out) {
    std::vector<double> sig(d->n);
    d->sphere(v.x, out, sig, nullptr);
  };
  bd.diffusion = [d](const StateView& v, std::span<double> out) {
    std::vector<double> f(d->n);
    d->sphere(v.x, f, out, nullptr);
  };
  bd.domain_projection = [](std::span<double> v) { normalize(v); };
  bd.extinction_distance = [](const StateView&) { return 1.0; };
  b.boundary_H = [d](const StateView& v) { return d->H(v.x); };
  {
    std::vector<double> e0(n, 0.0), ones(n, 1.0 / std::sqrt(static_cast<double>(n)));
    e0[0] = 1.0;
    b.boundary_ics = {StateVector{e0, 0}, StateVector{ones, 0}};
  }

  LyapunovSuite& suite = b.suite;
  suite = detail::constant_suite(2.0 + Sigma.squaredNorm());
  suite.V = [](const StateView& x) { return -std::log(detail::norm2(x.x)); };
  suite.H = [d](const StateView& z) { return d->H(z.x.first(d->n)); };
  suite.LV = [d](const StateView& x) {
    std::vector<double> v(x.x.begin(), x.x.end());
    normalize(v);
    return d->H(v);
  };
  suite.gammaV = [d](const StateView& x) {
    std::vector<double> v(x.x.begin(), x.x.end()), Av(d->n), Sv(d->n);
    normalize(v);
    double vAv, s2, eta;
    d->terms(v, Av, Sv, vAv, s2, eta);
    return eta * eta;
  };

  if (Sigma.cwiseAbs().maxCoeff() == 0.0) {
    suite.alpha_candidate = linear_sde_exponent(A);
  } else if (n == 1) {
    suite.alpha_candidate = -A(0, 0) + 0.5 * Sigma(0, 0) * Sigma(0, 0);
  } else {
    // inf over invariant measures of the H-average is at least min H on the sphere.
    RngStream rng(0x6c696eULL, 0);
    std::vector<double> v(n);
    double lo = HUGE_VAL;
    for (int s = 0; s < 20000; ++s) {
      rng.fill_normal(v);
      normalize(v);
      lo = std::min(lo, d->H(v));
    }
    suite.alpha_candidate = lo;
  }
  b.reference.emplace_back("alpha_candidate", suite.alpha_candidate);
  return b;
}

ModelSpec make_brownian(std::size_t dim) {
  if (dim == 0) throw Error(ErrorCode::DimensionMismatch, "dimension must be positive");
  ModelSpec m;
  m.name = "brownian";
  m.family = Family::Sde;
  m.dim = dim;
  m.noise_dim = dim;
  m.drift = [](const StateView&, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); };
  m.diffusion = [dim](const StateView&, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < dim; ++i) out[i * dim + i] = 1.0;
  };
  m.extinction_distance = [](const StateView& x) { return detail::norm2(x.x); };
  return m;
}

ModelSpec make_ou(double theta, double sigma) {
  if (!(theta > 0.0) || !(sigma >= 0.0))
    throw Error(ErrorCode::NegativeParameter, "OU needs theta > 0 and sigma >= 0");
  ModelSpec m;
  m.name = "ou";
  m.family = Family::Sde;
  m.dim = 1;
  m.noise_dim = 1;
  m.drift = [theta](const StateView& x, std::span<double> out) { out[0] = -theta * x.x[0]; };
  m.diffusion = [sigma](const StateView&, std::span<double> out) { out[0] = sigma; };
  m.extinction_distance = [](const StateView& x) { return std::abs(x.x[0]); };
  return m;
}

}  // namespace extinctd
