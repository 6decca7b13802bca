#pragma once

#include <Eigen/Core>

#include <stdexcept>

namespace flsa {

/// Elementwise sign(v) * (|v| - lambda1)_+ . Maps any lambda1 = 0 solution of
/// the signal approximator to the solution at lambda1 > 0.
template <typename Derived>
Eigen::VectorXd soft_threshold(const Eigen::MatrixBase<Derived>& v, double lambda1) {
  if (!(lambda1 >= 0.0))
    throw std::invalid_argument("soft_threshold: lambda1 must be >= 0");
  return (v.array().sign() * (v.array().abs() - lambda1).max(0.0)).matrix();
}

inline double soft_threshold(double v, double lambda1) {
  if (!(lambda1 >= 0.0))
    throw std::invalid_argument("soft_threshold: lambda1 must be >= 0");
  double m = std::abs(v) - lambda1;
  return m > 0.0 ? (v > 0.0 ? m : -m) : 0.0;
}

}  // namespace flsa
