#pragma once

#include <optional>

#include <Eigen/Dense>

#include "robustgasp/fitting.hpp"
#include "robustgasp/prediction.hpp"

namespace rgasp {

/// Multi-output emulator: one correlation matrix shared by the k columns of
/// the response, with per-column trend coefficients and variances.
struct PPGaSPModel : Emulator {};

/// Maximizes the pooled marginal posterior
///   sum_j [-1/2 log|R~| - 1/2 log|H^T R~^{-1} H| - (n - q)/2 log S2_j] + log prior.
PPGaSPModel fit_ppgasp(const Eigen::MatrixXd& design, const Eigen::MatrixXd& response, const TrendBasis& trend,
                       const KernelSpec& spec, const FitOptions& options = {});

struct PPPredictiveSummary {
  Eigen::MatrixXd mean;  // m x k
  Eigen::MatrixXd sd;
  Eigen::MatrixXd lower95;
  Eigen::MatrixXd upper95;
  double dof = 0.0;
  bool sd_is_scale = false;
};

PPPredictiveSummary predict_ppgasp(const PPGaSPModel& model, const Eigen::MatrixXd& testing_input,
                                   const std::optional<Eigen::MatrixXd>& testing_trend = std::nullopt,
                                   SdKind sd_kind = SdKind::kStudentT);

}  // namespace rgasp
