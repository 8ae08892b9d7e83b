// SPDX-License-Identifier: Apache-2.0
//
// Helpers shared by the model constructors.
#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "extinctd/lyapunov.hpp"

namespace extinctd::detail {

inline double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

/// Suite for compact (or homogeneous) state spaces: W = U = W' = U' = 1.
inline LyapunovSuite constant_suite(double K) {
  LyapunovSuite s;
  const Observable one = [](const StateView&) { return 1.0; };
  const Observable zero = [](const StateView&) { return 0.0; };
  s.W = s.Wprime = s.U = s.Uprime = one;
  s.LW = s.LU = s.gammaW = zero;
  s.K = K;
  return s;
}

/// A length-1 list is repeated m times; otherwise the length must be m.
inline std::vector<double> broadcast(const std::vector<double>& v, std::size_t m,
                                     const std::string& name) {
  if (v.size() == 1) return std::vector<double>(m, v.front());
  if (v.size() != m)
    throw Error(ErrorCode::DimensionMismatch, name + " must have 1 or " + std::to_string(m) +
                                                  " entries, got " + std::to_string(v.size()));
  return v;
}

inline Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& rows,
                                 const std::string& name) {
  if (rows.empty()) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size())
      throw Error(ErrorCode::DimensionMismatch, name + " has ragged rows");
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

inline double at(const Eigen::MatrixXd& m, std::size_t i, std::size_t j) {
  return m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

}  // namespace extinctd::detail
