#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include <Eigen/Dense>

#include "robustgasp/fitting.hpp"

namespace rgasp {

/// What the reported "sd" means. kStudentT is the standard deviation of the
/// predictive t law, scale * sqrt(nu / (nu - 2)); it falls back to the scale
/// when nu <= 2, where that moment does not exist.
enum class SdKind { kStudentT, kScale };

struct PredictiveSummary {
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;
  Eigen::VectorXd lower95;
  Eigen::VectorXd upper95;
  Eigen::VectorXd scale;  // sqrt(sigma2_hat * c**)
  double dof = 0.0;
  bool sd_is_scale = false;

  /// Equal-tailed interval of the predictive t law at the given level.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> interval(double level) const;
};

/// Location and scale pieces shared by all response columns.
struct PredictiveCore {
  Eigen::MatrixXd mean;    // m x k
  Eigen::VectorXd c_star;  // m, clamped at zero
};

PredictiveCore predictive_core(const Emulator& model, const Eigen::MatrixXd& testing_input,
                               const std::optional<Eigen::MatrixXd>& testing_trend = std::nullopt);

double t_quantile(double dof, double prob);

PredictiveSummary summarize(const Eigen::VectorXd& mean, const Eigen::VectorXd& scale, double dof, SdKind sd_kind);

PredictiveSummary predict(const GaSPModel& model, const Eigen::MatrixXd& testing_input,
                          const std::optional<Eigen::MatrixXd>& testing_trend = std::nullopt,
                          SdKind sd_kind = SdKind::kStudentT);

/// Joint draws from the multivariate t predictive law; one column per draw.
Eigen::MatrixXd simulate(const GaSPModel& model, const Eigen::MatrixXd& testing_input, int num_sample,
                         std::uint64_t seed, const std::optional<Eigen::MatrixXd>& testing_trend = std::nullopt);

struct LooResult {
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;
  Eigen::VectorXd scale;
  Eigen::VectorXd std_resid;  // (y_i - mean_i) / scale_i, t-distributed with `dof`
  double dof = 0.0;
};

/// Leave-one-out predictions with (beta, eta) fixed at the fitted values and
/// theta, sigma^2 re-estimated per fold, via the closed-form downdate
///   mean_i = y_i - (Qy)_i / Q_ii,  scale_i^2 = sigma2_{-i} / Q_ii.
LooResult leave_one_out(const GaSPModel& model, SdKind sd_kind = SdKind::kStudentT);

struct PredictionMetrics {
  double rmse = 0.0;
  double p_ci95 = 0.0;
  double l_ci95 = 0.0;
};

PredictionMetrics metrics(const PredictiveSummary& predictions, const Eigen::VectorXd& truth);

/// Multi-output form: averages over every (test point, output) entry.
PredictionMetrics metrics(const Eigen::MatrixXd& mean, const Eigen::MatrixXd& lower, const Eigen::MatrixXd& upper,
                          const Eigen::MatrixXd& truth);

}  // namespace rgasp
