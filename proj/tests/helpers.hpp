#pragma once

#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Dense>

#include "robustgasp/kernels.hpp"

namespace rgasp::testing {

inline Eigen::MatrixXd random_design(int n, int p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd x(n, p);
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < p; ++l) x(i, l) = unif(rng);
  }
  return x;
}

inline Eigen::VectorXd random_vector(int n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(lo, hi);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = unif(rng);
  return v;
}

/// Rough but non-trivial response used across the fitting tests.
inline Eigen::VectorXd wavy_response(const Eigen::MatrixXd& x) {
  Eigen::VectorXd y(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double v = 0.0;
    for (Eigen::Index l = 0; l < x.cols(); ++l) v += std::sin((6.0 + l) * x(i, l)) / (1.0 + l);
    y[i] = v + x(i, 0) * x(i, x.cols() - 1);
  }
  return y;
}

inline Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                          const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

inline double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-12);
}

inline KernelFamily family_for(int i) {
  switch (i % 3) {
    case 0: return KernelFamily::kMatern52;
    case 1: return KernelFamily::kMatern32;
    default: return KernelFamily::kPowerExponential;
  }
}

}  // namespace rgasp::testing
