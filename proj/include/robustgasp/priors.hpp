#pragma once

#include <string>

#include <Eigen/Dense>

#include "robustgasp/kernels.hpp"
#include "robustgasp/marginal.hpp"

namespace rgasp {

enum class PriorChoice {
  kJointlyRobust,  // "ref_approx", the default
  kRefGamma,
  kRefXi,
  kFlat,  // no prior; maximizes the marginal likelihood alone
};

const char* to_string(PriorChoice prior);
PriorChoice parse_prior_choice(const std::string& name);

/// How the per-dimension scale constants C_l are computed from the design.
enum class ScaleRule {
  kRangeOverRootN,  // (max_l - min_l) / n^{1/p}
  kMeanPairwise,    // mean of |x_il - x_jl| over i != j
};

const char* to_string(ScaleRule rule);
ScaleRule parse_scale_rule(const std::string& name);

/// Parameters of the jointly robust prior
///   (sum_l C_l beta_l)^a exp(-b (sum_l C_l beta_l + eta)).
struct JRPriorParams {
  double a = 0.2;
  double b = 1.0;
  Eigen::VectorXd C;
};

/// Mean absolute pairwise coordinate difference per dimension.
Eigen::VectorXd mean_pairwise_distance(const Eigen::MatrixXd& design);

/// Per-dimension scale constants; raises a zero-scale error naming the first
/// dimension whose coordinates are all equal.
Eigen::VectorXd design_scales(const Eigen::MatrixXd& design, ScaleRule rule);

/// a = 0.2, b = n^{-1/p} (a + p), C from `rule`. The same defaults apply
/// with and without an estimated nugget.
JRPriorParams default_jr_params(const Eigen::MatrixXd& design, ScaleRule rule = ScaleRule::kRangeOverRootN);

/// a log t - b (t + eta) with t = sum_l C_l beta_l; the eta term is dropped
/// when `with_eta` is false. Returns -inf when t = 0.
double log_jr_prior(const Eigen::VectorXd& beta, double eta, bool with_eta, const JRPriorParams& params);

/// Gradient of log_jr_prior in (log beta[, log eta]).
Eigen::VectorXd log_jr_prior_grad(const Eigen::VectorXd& beta, double eta, bool with_eta,
                                  const JRPriorParams& params);

enum class RefParameterization { kGamma, kXi };

/// Expected Fisher information I* after integrating out (theta, sigma^2),
/// with derivative directions in the requested parameterization and, when
/// `with_eta`, a trailing nugget direction dR/deta = I.
Eigen::MatrixXd ref_fisher_information(const MarginalState& state, const DistanceTensor<double>& dist,
                                       const KernelSpec& spec, RefParameterization param, bool with_eta);

/// 1/2 log|I*|; -inf if I* is not positive definite.
double log_ref_prior(const MarginalState& state, const DistanceTensor<double>& dist, const KernelSpec& spec,
                     RefParameterization param, bool with_eta);

}  // namespace rgasp
