#pragma once

#include <Eigen/Dense>

#include "robustgasp/kernels.hpp"
#include "robustgasp/trend.hpp"

namespace rgasp {

/// How the nugget-variance ratio eta enters the model.
struct NuggetSpec {
  enum class Mode { kNoiseFree, kFixed, kEstimated };

  Mode mode = Mode::kNoiseFree;
  double eta = 0.0;  // value for kFixed; ignored otherwise

  static NuggetSpec noise_free() { return {Mode::kNoiseFree, 0.0}; }
  static NuggetSpec fixed(double eta) { return {Mode::kFixed, eta}; }
  static NuggetSpec estimated() { return {Mode::kEstimated, 0.0}; }

  bool is_estimated() const { return mode == Mode::kEstimated; }
};

/// Everything derived from one Cholesky factorization of R~ = R + eta I at a
/// fixed (beta, eta). Handles k response columns sharing R~; the scalar model
/// is k = 1. Immutable once built.
struct MarginalState {
  Eigen::Index n = 0;
  Eigen::Index q = 0;
  Eigen::Index k = 0;
  Eigen::VectorXd beta;
  double eta = 0.0;

  Eigen::MatrixXd corr;              // R, without the nugget
  Eigen::LLT<Eigen::MatrixXd> chol;  // R~ = L L^T
  Eigen::MatrixXd H;                 // n x q
  Eigen::MatrixXd rinv_h;            // R~^{-1} H
  Eigen::LLT<Eigen::MatrixXd> gram;  // H^T R~^{-1} H
  Eigen::MatrixXd theta;             // q x k generalized least squares coefficients
  Eigen::VectorXd S2;                // k residual quadratic forms y^T Q y
  Eigen::MatrixXd Qy;                // n x k, R~^{-1} (Y - H theta)
  double log_det_R = 0.0;            // log |R~|
  double log_det_G = 0.0;            // log |H^T R~^{-1} H|

  Eigen::Index dof() const { return n - q; }
};

/// Factorizes R~ and derives every cached quantity. A failed factorization
/// raises a near-singular-correlation error; no jitter is ever added.
MarginalState build_state(const DistanceTensor<double>& dist, const Eigen::MatrixXd& response,
                          const Eigen::MatrixXd& basis, const KernelSpec& spec, const Eigen::VectorXd& beta,
                          double eta);

MarginalState build_state(const Eigen::MatrixXd& design, const Eigen::VectorXd& response, const TrendBasis& trend,
                          const KernelSpec& spec, const Eigen::VectorXd& beta, double eta);

/// Log of the (theta, sigma^2)-integrated likelihood up to an additive
/// constant, summed over the k response columns:
///   k (-1/2 log|R~| - 1/2 log|H^T R~^{-1} H|) - (n-q)/2 sum_j log S2_j.
double log_marginal_lik(const MarginalState& state);

/// Gradient of log_marginal_lik in (log beta_1..log beta_p[, log eta]).
Eigen::VectorXd log_marginal_lik_grad(const MarginalState& state, const DistanceTensor<double>& dist,
                                      const KernelSpec& spec, bool with_eta);

/// Q = R~^{-1} P, formed densely. Used by the reference prior and by
/// leave-one-out diagnostics, never by the likelihood itself.
Eigen::MatrixXd projection_q(const MarginalState& state);

}  // namespace rgasp
