// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "extinctd/criteria.hpp"
#include "extinctd/models.hpp"
#include "model_util.hpp"

namespace extinctd {

namespace {

void check(const LorenzParams& p) {
  if (!(p.gamma > 0.0) || !(p.z_star > 0.0) || !(p.eta > 0.0))
    throw Error(ErrorCode::NegativeParameter, "gamma, z_star and eta must be positive");
  if (!(p.alpha0 >= 0.0)) throw Error(ErrorCode::NegativeParameter, "alpha0 must be >= 0");
}

// Q = (2 + 2 eta) x^2 + 2 x y + eta y^2 + z^2 has drift derivative
// D = -4 x^2 - (4 eta - 2) y^2 - 2 gamma z (z - z*).
struct Quadratic {
  LorenzParams p;

  double Q(double x, double y, double z) const {
    return (2.0 + 2.0 * p.eta) * x * x + 2.0 * x * y + p.eta * y * y + z * z;
  }
  double D(double x, double y, double z) const {
    return -4.0 * x * x - (4.0 * p.eta - 2.0) * y * y - 2.0 * p.gamma * z * (z - p.z_star);
  }
  // L e^{bQ} / e^{bQ}
  double growth(double b, double x, double y, double z) const {
    const double a2 = p.alpha0 * p.alpha0;
    return b * D(x, y, z) + b * a2 + 2.0 * b * b * a2 * z * z;
  }
};

}  // namespace

LorenzParams lorenz_from_classic(double sigma, double rho, double beta, double alpha_hat) {
  if (!(sigma > 0.0) || !(beta > 0.0) || !(alpha_hat >= 0.0))
    throw Error(ErrorCode::NegativeParameter, "sigma and beta must be positive, alpha_hat >= 0");
  const double chi = 2.0 / (1.0 + sigma);
  const double c3 = chi * chi * sigma;
  LorenzParams p;
  p.gamma = chi * beta;
  p.z_star = 2.0 + chi * chi * sigma * (rho - 1.0);
  p.eta = (1.0 + sigma) / (2.0 * sigma);
  p.alpha0 = c3 * std::sqrt(chi) * alpha_hat;
  return p;
}

ModelSpec lorenz_boundary_model(double gamma, double z_star, double eta, double alpha0) {
  check({gamma, z_star, eta, alpha0});
  ModelSpec m;
  m.name = "lorenz-boundary";
  m.family = Family::Sde;
  m.dim = 2;
  m.noise_dim = 1;
  m.drift = [gamma, z_star](const StateView& s, std::span<double> out) {
    const double th = s.x[0];
    const double z = s.x[1];
    const double sn = std::sin(th);
    out[0] = 1.0 - z * sn * sn;
    out[1] = -gamma * (z - z_star);
  };
  m.diffusion = [alpha0](const StateView&, std::span<double> out) {
    out[0] = 0.0;
    out[1] = alpha0;
  };
  m.extinction_distance = [](const StateView&) { return 1.0; };
  return m;
}

Observable lorenz_boundary_H() {
  return [](const StateView& s) {
    const double z = s.x.size() == 3 ? s.x[2] : s.x[1];
    return 1.0 - 0.5 * z * std::sin(2.0 * s.x[0]);
  };
}

ModelBundle make_lorenz(const LorenzParams& p) {
  check(p);
  if (!(p.eta > 0.5))
    throw Error(ErrorCode::InvalidArgument, "the Lyapunov suite needs eta > 1/2");
  const double gamma = p.gamma;
  const double z_star = p.z_star;
  const double eta = p.eta;
  const double alpha0 = p.alpha0;

  ModelBundle b;
  ModelSpec& m = b.model;
  m.name = "lorenz";
  m.family = Family::Sde;
  m.dim = 3;
  m.noise_dim = 1;
  m.drift = [gamma, z_star, eta](const StateView& s, std::span<double> out) {
    const double x = s.x[0], y = s.x[1], z = s.x[2];
    out[0] = y;
    out[1] = x * (z - 2.0) - 2.0 * y;
    out[2] = -(gamma * (z - z_star) + x * (x + eta * y));
  };
  m.diffusion = [alpha0](const StateView&, std::span<double> out) {
    out[0] = 0.0;
    out[1] = 0.0;
    out[2] = alpha0;
  };
  m.extinction_distance = [](const StateView& s) { return std::hypot(s.x[0], s.x[1]); };

  // Cylinder coordinates (theta, R, z) with x = R sin(theta), x + y = R cos(theta).
  QuadrupleMap q;
  ModelSpec& y = q.blown_up;
  y.name = "lorenz-cylinder";
  y.family = Family::Sde;
  y.dim = 3;
  y.noise_dim = 1;
  y.drift = [gamma, z_star, eta](const StateView& s, std::span<double> out) {
    const double th = s.x[0], R = s.x[1], z = s.x[2];
    const double sn = std::sin(th), cs = std::cos(th);
    out[0] = 1.0 - z * sn * sn;
    out[1] = R * (-1.0 + z * sn * cs);
    out[2] = -(gamma * (z - z_star) + R * R * sn * (sn + eta * (cs - sn)));
  };
  y.diffusion = m.diffusion;
  y.extinction_distance = [](const StateView& s) { return std::abs(s.x[1]); };
  q.forward = [](std::span<const double> c, std::span<double> x) {
    x[0] = c[1] * std::sin(c[0]);
    x[1] = c[1] * (std::cos(c[0]) - std::sin(c[0]));
    x[2] = c[2];
  };
  q.lift = [](std::span<const double> x, std::span<double> c) {
    const double w = x[0] + x[1];
    c[0] = std::atan2(x[0], w);
    c[1] = std::hypot(x[0], w);
    c[2] = x[2];
  };
  q.boundary_preimage = "{R = 0}: the cylinder S^1 x R in (theta, z)";
  b.map = std::move(q);

  b.boundary = lorenz_boundary_model(gamma, z_star, eta, alpha0);
  b.boundary_H = lorenz_boundary_H();
  b.boundary_ics = {StateVector{{0.3, z_star}, 0}, StateVector{{2.0, z_star + 0.5}, 0}};

  LyapunovSuite& suite = b.suite;
  suite.V = [](const StateView& s) {
    const double w = s.x[0] + s.x[1];
    return -0.5 * std::log(s.x[0] * s.x[0] + w * w);
  };
  suite.H = lorenz_boundary_H();  // on (theta, R, z); independent of R
  suite.LV = [](const StateView& s) {
    const double x = s.x[0], w = s.x[0] + s.x[1];
    // (z/2) sin(2 theta) = z sin cos = z x w / R^2
    return 1.0 - s.x[2] * x * w / (x * x + w * w);
  };
  suite.gammaV = [](const StateView&) { return 0.0; };

  // U = e^{aQ/2}, W = e^{aQ/4}; U' = K - LU and W' = K - LW, with K found
  // by scanning the bounded region where LU or LW can be positive.
  const Quadratic quad{p};
  const double a = alpha0 > 0.0 ? std::min(0.1, gamma / (2.0 * alpha0 * alpha0)) : 0.1;
  const double bu = a / 2.0;
  const double bw = a / 4.0;
  const auto LU = [quad, bu](double x, double yy, double z) {
    return quad.growth(bu, x, yy, z) * std::exp(bu * quad.Q(x, yy, z));
  };
  const auto LW = [quad, bw](double x, double yy, double z) {
    return quad.growth(bw, x, yy, z) * std::exp(bw * quad.Q(x, yy, z));
  };
  const auto gammaW = [quad, bw, alpha0](double x, double yy, double z) {
    const double dz = 2.0 * bw * z * std::exp(bw * quad.Q(x, yy, z));
    return alpha0 * alpha0 * dz * dz;
  };

  // growth(b) <= 0 outside an ellipsoid centred at z = gamma z* / cz.
  const double cz = 2.0 * gamma - 2.0 * bu * alpha0 * alpha0;
  const double peak = alpha0 * alpha0 + (gamma * z_star) * (gamma * z_star) / cz;
  const double xr = 1.5 * std::sqrt(peak / 4.0) + 0.1;
  const double yr = 1.5 * std::sqrt(peak / (4.0 * eta - 2.0)) + 0.1;
  const double zc = gamma * z_star / cz;
  const double zr = 1.5 * std::sqrt(peak / cz) + 0.1;
  double sup = 0.0;
  constexpr int kGrid = 24;
  for (int i = 0; i <= kGrid; ++i)
    for (int j = 0; j <= kGrid; ++j)
      for (int k = 0; k <= kGrid; ++k) {
        const double x = -xr + 2.0 * xr * i / kGrid;
        const double yy = -yr + 2.0 * yr * j / kGrid;
        const double z = zc - zr + 2.0 * zr * k / kGrid;
        sup = std::max({sup, LU(x, yy, z), LW(x, yy, z)});
      }
  double K = 2.0 * sup + 2.0;
  // Gamma W <= K U' on a wider box, K raised when needed.
  for (int pass = 0; pass < 3; ++pass) {
    double ratio = 0.0;
    for (int i = 0; i <= kGrid; ++i)
      for (int j = 0; j <= kGrid; ++j)
        for (int k = 0; k <= kGrid; ++k) {
          const double x = -4.0 * xr + 8.0 * xr * i / kGrid;
          const double yy = -4.0 * yr + 8.0 * yr * j / kGrid;
          const double z = zc - 4.0 * zr - 2.0 + (8.0 * zr + 4.0) * k / kGrid;
          ratio = std::max(ratio, gammaW(x, yy, z) / (K - LU(x, yy, z)));
        }
    if (ratio <= K) break;
    K = 1.5 * ratio;
  }
  suite.K = K;
  suite.U = [quad, bu](const StateView& s) { return std::exp(bu * quad.Q(s.x[0], s.x[1], s.x[2])); };
  suite.W = [quad, bw](const StateView& s) { return std::exp(bw * quad.Q(s.x[0], s.x[1], s.x[2])); };
  suite.LU = [LU](const StateView& s) { return LU(s.x[0], s.x[1], s.x[2]); };
  suite.LW = [LW](const StateView& s) { return LW(s.x[0], s.x[1], s.x[2]); };
  suite.Uprime = [LU, K](const StateView& s) { return K - LU(s.x[0], s.x[1], s.x[2]); };
  suite.Wprime = [LW, K](const StateView& s) { return K - LW(s.x[0], s.x[1], s.x[2]); };
  suite.gammaW = [gammaW](const StateView& s) { return gammaW(s.x[0], s.x[1], s.x[2]); };
  suite.alpha_candidate = -lorenz_lambda0(z_star);

  b.reference.emplace_back("gamma", gamma);
  b.reference.emplace_back("z_star", z_star);
  b.reference.emplace_back("eta", eta);
  b.reference.emplace_back("alpha0", alpha0);
  b.reference.emplace_back("lambda0", lorenz_lambda0(z_star));
  b.reference.emplace_back("lambda_measures", lorenz_lambda_measures(z_star));
  return b;
}

}  // namespace extinctd
