// SPDX-License-Identifier: Apache-2.0
#include "extinctd/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "extinctd/models.hpp"

namespace extinctd {

namespace {

void require_square(const Eigen::MatrixXd& a, const char* what) {
  if (a.rows() != a.cols())
    throw Error(ErrorCode::NonSquare, std::string(what) + " must be square, got " +
                                          std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
}

bool strongly_connected(const Eigen::MatrixXd& q) {
  const Eigen::Index m = q.rows();
  if (m <= 1) return true;
  // Reachability from node 0 forward and backward.
  const auto reach = [&](bool transpose) {
    std::vector<char> seen(static_cast<std::size_t>(m), 0);
    std::vector<Eigen::Index> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const Eigen::Index i = stack.back();
      stack.pop_back();
      for (Eigen::Index j = 0; j < m; ++j) {
        const double rate = transpose ? q(j, i) : q(i, j);
        if (j != i && rate > 0.0 && !seen[static_cast<std::size_t>(j)]) {
          seen[static_cast<std::size_t>(j)] = 1;
          stack.push_back(j);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
  };
  return reach(false) && reach(true);
}

}  // namespace

CtmcGenerator::CtmcGenerator(Eigen::MatrixXd q) : q_(std::move(q)) {
  require_square(q_, "rate matrix");
  if (q_.rows() == 0) throw Error(ErrorCode::InvalidRateMatrix, "rate matrix is empty");
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = q_;
  check_rate_matrix({rm.data(), static_cast<std::size_t>(rm.size())},
                    static_cast<std::size_t>(q_.rows()));
  irreducible_ = strongly_connected(q_);
}

Eigen::VectorXd ctmc_stationary(const CtmcGenerator& gen) {
  if (!gen.irreducible()) throw Error(ErrorCode::Reducible, "rate matrix is reducible");
  const Eigen::MatrixXd& q = gen.q();
  const Eigen::Index m = q.rows();
  Eigen::MatrixXd lhs = q.transpose();
  lhs.row(m - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  rhs(m - 1) = 1.0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs);
  if (!(std::abs(lu.determinant()) > 0.0))
    throw Error(ErrorCode::SingularSolve, "stationary system is singular");
  Eigen::VectorXd rho = lu.solve(rhs);
  if (!rho.allFinite()) throw Error(ErrorCode::SingularSolve, "stationary solve produced non-finite values");
  for (Eigen::Index i = 0; i < m; ++i) rho(i) = std::max(rho(i), 0.0);
  rho /= rho.sum();
  const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
  if ((rho.transpose() * q).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw Error(ErrorCode::SingularSolve, "stationary residual exceeds 1e-10");
  return rho;
}

TopEigen top_eigenvalue(const Eigen::MatrixXd& a, double tol, std::size_t max_iter) {
  require_square(a, "matrix");
  const Eigen::Index n = a.rows();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "matrix is empty");
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  if (!std::isfinite(norm)) throw Error(ErrorCode::NonFiniteState, "matrix has non-finite entries");
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, norm))
    throw Error(ErrorCode::InvalidArgument, "matrix is not symmetric");

  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = 1.0 + 0.01 * std::sin(static_cast<double>(i + 1));
  v.normalize();
  if (norm == 0.0) return {0.0, v};

  // The shift by the infinity norm makes every eigenvalue of a + cI
  // nonnegative, so the dominant one is the top eigenvalue of a.
  const double shift = norm;
  Eigen::VectorXd w(n);
  for (std::size_t it = 0; it < max_iter; ++it) {
    w.noalias() = a * v;
    const double lambda = v.dot(w);
    const double residual = (w - lambda * v).norm();
    if (residual <= tol * norm) {
      if (v.sum() < 0.0) v = -v;
      return {lambda, v};
    }
    w += shift * v;
    v = w / w.norm();
  }
  throw Error(ErrorCode::NoConvergence,
              "power iteration did not converge in " + std::to_string(max_iter) + " iterations");
}

double max_real_eigenvalue(const Eigen::MatrixXd& a) {
  require_square(a, "matrix");
  if (a.rows() == 0) throw Error(ErrorCode::InvalidArgument, "matrix is empty");
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "eigensolver failed");
  return solver.eigenvalues().real().maxCoeff();
}

double sis_extinction_index(const std::vector<double>& delta, const std::vector<double>& beta,
                            const std::vector<double>& lambda1, const std::vector<double>& rho) {
  const std::size_t m = rho.size();
  if (delta.size() != m || beta.size() != m || lambda1.size() != m)
    throw Error(ErrorCode::LengthMismatch, "delta, beta, lambda1 and rho must have equal length");
  double index = 0.0;
  for (std::size_t s = 0; s < m; ++s) index += rho[s] * (delta[s] - beta[s] * lambda1[s]);
  return index;
}

double lorenz_lambda0(double z_star) { return z_star > 1.0 ? std::sqrt(z_star - 1.0) - 1.0 : -1.0; }

std::vector<BoundaryMeasure> lorenz_boundary_measures(double z_star) {
  if (z_star < 1.0) {
    // theta rotates with density proportional to 1/(1 - z* sin^2 theta); the
    // sin(2 theta) part integrates to zero by the symmetry theta -> -theta.
    return {{"rotating-circle", 1.0}};
  }
  // sin^2 theta = 1/z*, so sin(theta)cos(theta) = +-sqrt(z* - 1)/z*.
  const double root = std::sqrt(z_star - 1.0);
  return {{"fixed-point-plus", 1.0 - root}, {"fixed-point-minus", 1.0 + root}};
}

double lorenz_lambda_measures(double z_star) {
  double lo = HUGE_VAL;
  for (const BoundaryMeasure& m : lorenz_boundary_measures(z_star)) lo = std::min(lo, m.h_integral);
  return -lo;
}

ExponentEstimate lorenz_lambda_mc(double gamma, double z_star, double eta, double alpha0,
                                  const SimConfig& cfg, std::size_t reps,
                                  const EstimatorOptions& opts, std::vector<StateVector> ics) {
  if (alpha0 < 0.0) throw Error(ErrorCode::NegativeParameter, "alpha0 must be >= 0");
  const ModelSpec boundary = lorenz_boundary_model(gamma, z_star, eta, alpha0);
  if (ics.empty()) ics = {StateVector{{0.3, z_star}, 0}, StateVector{{2.0, z_star + 0.5}, 0}};
  const ExponentEstimate h =
      boundary_exponent(boundary, lorenz_boundary_H(), ics, cfg, reps, opts).estimate;
  ExponentEstimate out = h;
  out.point = -h.point;
  out.ci_low = -h.ci_high;
  out.ci_high = -h.ci_low;
  return out;
}

ExponentEstimate invasion_rate(const ModelSpec& boundary_model, std::size_t species_index,
                               const Observable& H_i, const std::vector<StateVector>& ics,
                               const SimConfig& cfg, std::size_t reps,
                               const EstimatorOptions& opts) {
  if (species_index >= boundary_model.dim)
    throw Error(ErrorCode::IndexOutOfRange, "species index " + std::to_string(species_index) +
                                                " outside dimension " +
                                                std::to_string(boundary_model.dim));
  for (const StateVector& ic : ics) {
    if (ic.x.size() != boundary_model.dim)
      throw Error(ErrorCode::DimensionMismatch, "initial condition dimension differs from model");
    if (ic.x[species_index] != 0.0)
      throw Error(ErrorCode::InvalidArgument,
                  "invasion rate needs initial conditions with species " +
                      std::to_string(species_index) + " absent");
  }
  const ExponentEstimate h = boundary_exponent(boundary_model, H_i, ics, cfg, reps, opts).estimate;
  ExponentEstimate out = h;
  out.point = -h.point;
  out.ci_low = -h.ci_high;
  out.ci_high = -h.ci_low;
  return out;
}

InvasionCriterion weighted_invasion_criterion(const std::vector<double>& p,
                                              const std::vector<ExponentEstimate>& rates) {
  if (p.size() != rates.size())
    throw Error(ErrorCode::LengthMismatch, "weights and rates must have equal length");
  InvasionCriterion c;
  double var = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] > 0.0)) throw Error(ErrorCode::NegativeParameter, "weights must be positive");
    c.value += p[i] * rates[i].point;
    const double half = 0.5 * (rates[i].ci_high - rates[i].ci_low);
    var += p[i] * p[i] * half * half;
  }
  c.ci_high = c.value + std::sqrt(var);
  c.extinct = c.ci_high < 0.0;
  return c;
}

InvasionCriterion weighted_invasion_criterion(const std::vector<double>& p,
                                              const std::vector<double>& rates) {
  std::vector<ExponentEstimate> est;
  est.reserve(rates.size());
  for (double r : rates) est.push_back(closed_form_estimate(r));
  return weighted_invasion_criterion(p, est);
}

Observable kolmogorov_H(ComponentFn f, ComponentFn g, const Eigen::MatrixXd& sigma,
                        std::size_t i) {
  require_square(sigma, "noise covariance");
  if (i >= static_cast<std::size_t>(sigma.rows()))
    throw Error(ErrorCode::IndexOutOfRange, "species index " + std::to_string(i) +
                                                " outside covariance of size " +
                                                std::to_string(sigma.rows()));
  const double s_ii = sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
  return [f = std::move(f), g = std::move(g), s_ii, i](const StateView& x) {
    const double gi = g(x, i);
    return 0.5 * s_ii * gi * gi - f(x, i);
  };
}

}  // namespace extinctd
