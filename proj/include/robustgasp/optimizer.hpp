#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>

namespace rgasp {

/// Returns the objective value and writes its gradient. Non-finite values
/// mark infeasible points; the line search steps back from them.
using SmoothObjective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

struct LbfgsOptions {
  int max_eval = 30;
  double xtol_rel = 1e-5;
  int memory = 10;
  double max_step = 5.0;  // infinity-norm cap on one step
};

enum class LbfgsStatus {
  kXtolReached,
  kGradientVanished,
  kMaxEvalReached,
  kLineSearchFailed,
  kInfeasibleStart,
};

const char* to_string(LbfgsStatus status);

struct LbfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd grad;
  int evaluations = 0;
  int iterations = 0;
  LbfgsStatus status = LbfgsStatus::kMaxEvalReached;
};

/// Limited-memory BFGS minimization subject to x >= lower (use -inf for
/// unbounded coordinates). Bound handling is by projection: coordinates at
/// their bound with an outward-pointing gradient are frozen for the
/// iteration and the trial points are projected back onto the box.
LbfgsResult minimize_lbfgs(const SmoothObjective& objective, const Eigen::VectorXd& x0,
                           const Eigen::VectorXd& lower, const LbfgsOptions& options = {});

}  // namespace rgasp
