#include "robustgasp/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace rgasp {

const char* to_string(LbfgsStatus status) {
  switch (status) {
    case LbfgsStatus::kXtolReached: return "xtol_reached";
    case LbfgsStatus::kGradientVanished: return "gradient_vanished";
    case LbfgsStatus::kMaxEvalReached: return "max_eval_reached";
    case LbfgsStatus::kLineSearchFailed: return "line_search_failed";
    case LbfgsStatus::kInfeasibleStart: return "infeasible_start";
  }
  return "unknown";
}

namespace {

struct CorrectionPair {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  double rho;
};

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lower) {
  return x.cwiseMax(lower);
}

// Two-loop recursion: returns H * v for the current inverse Hessian estimate.
Eigen::VectorXd apply_inverse_hessian(const std::deque<CorrectionPair>& pairs, const Eigen::VectorXd& v) {
  Eigen::VectorXd r = v;
  std::vector<double> alpha(pairs.size());
  for (std::size_t i = pairs.size(); i-- > 0;) {
    alpha[i] = pairs[i].rho * pairs[i].s.dot(r);
    r -= alpha[i] * pairs[i].y;
  }
  if (!pairs.empty()) {
    const auto& last = pairs.back();
    r *= last.s.dot(last.y) / last.y.squaredNorm();
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double b = pairs[i].rho * pairs[i].y.dot(r);
    r += (alpha[i] - b) * pairs[i].s;
  }
  return r;
}

}  // namespace

LbfgsResult minimize_lbfgs(const SmoothObjective& objective, const Eigen::VectorXd& x0,
                           const Eigen::VectorXd& lower, const LbfgsOptions& options) {
  constexpr double kArmijo = 1e-4;
  const Eigen::Index dim = x0.size();

  LbfgsResult result;
  result.x = project(x0, lower);
  result.grad = Eigen::VectorXd::Zero(dim);
  result.value = objective(result.x, result.grad);
  result.evaluations = 1;
  if (!std::isfinite(result.value) || !result.grad.allFinite()) {
    result.status = LbfgsStatus::kInfeasibleStart;
    return result;
  }

  std::deque<CorrectionPair> pairs;
  Eigen::VectorXd& x = result.x;
  Eigen::VectorXd& g = result.grad;
  double& f = result.value;

  while (result.evaluations < options.max_eval) {
    Eigen::VectorXd masked = g;
    for (Eigen::Index i = 0; i < dim; ++i) {
      const bool at_bound = std::isfinite(lower[i]) && x[i] <= lower[i];
      if (at_bound && g[i] > 0.0) masked[i] = 0.0;
    }
    if (masked.lpNorm<Eigen::Infinity>() == 0.0) {
      result.status = LbfgsStatus::kGradientVanished;
      return result;
    }

    Eigen::VectorXd dir = -apply_inverse_hessian(pairs, masked);
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (masked[i] == 0.0 && g[i] != 0.0) dir[i] = 0.0;
    }
    if (!(dir.dot(masked) < 0.0)) {
      pairs.clear();
      dir = -masked;
    }

    double step = 1.0;
    const double dir_norm = dir.lpNorm<Eigen::Infinity>();
    if (pairs.empty()) step = std::min(1.0, 1.0 / dir_norm);
    if (step * dir_norm > options.max_step) step = options.max_step / dir_norm;

    const double plateau_tol = 1e-12 * (1.0 + std::abs(f));
    bool accepted = false;
    Eigen::VectorXd x_new, g_new(dim), s;
    double f_new = 0.0;
    while (result.evaluations < options.max_eval) {
      x_new = project(x + step * dir, lower);
      s = x_new - x;
      if (s.lpNorm<Eigen::Infinity>() == 0.0) break;
      f_new = objective(x_new, g_new);
      ++result.evaluations;
      const double slope = g.dot(s);
      if (std::isfinite(f_new) && g_new.allFinite()) {
        const bool sufficient = f_new <= f + kArmijo * slope;
        // Approximate Wolfe: on numerically flat stretches accept a
        // non-increasing value as long as the path still descends.
        const bool plateau = f_new <= f + plateau_tol && g_new.dot(s) < 0.0;
        if (sufficient || plateau) {
          accepted = true;
          break;
        }
        const double denom = 2.0 * (f_new - f - slope);
        double shrink = denom > 0.0 ? -slope / denom : 0.5;
        step *= std::clamp(shrink, 0.1, 0.5);
      } else {
        step *= 0.1;
      }
    }

    if (!accepted) {
      result.status = result.evaluations >= options.max_eval ? LbfgsStatus::kMaxEvalReached
                                                             : LbfgsStatus::kLineSearchFailed;
      return result;
    }

    ++result.iterations;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > std::numeric_limits<double>::epsilon() * s.norm() * y.norm() && sy > 0.0) {
      pairs.push_back({s, y, 1.0 / sy});
      if (static_cast<int>(pairs.size()) > options.memory) pairs.pop_front();
    }
    x = x_new;
    g = g_new;
    f = f_new;

    bool small = true;
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (std::abs(s[i]) > options.xtol_rel * std::abs(x[i])) small = false;
    }
    if (small) {
      result.status = LbfgsStatus::kXtolReached;
      return result;
    }
  }
  result.status = LbfgsStatus::kMaxEvalReached;
  return result;
}

}  // namespace rgasp
