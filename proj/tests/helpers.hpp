// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <initializer_list>

#include <Eigen/Dense>

#include "extinctd/error.hpp"

namespace testutil {

// Code of the extinctd::Error thrown by fn, or Ok when nothing is thrown.
inline extinctd::ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const extinctd::Error& e) {
    return e.code();
  }
  return extinctd::ErrorCode::Ok;
}

inline Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace testutil
