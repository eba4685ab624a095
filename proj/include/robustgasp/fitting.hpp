#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "robustgasp/kernels.hpp"
#include "robustgasp/marginal.hpp"
#include "robustgasp/optimizer.hpp"
#include "robustgasp/priors.hpp"
#include "robustgasp/trend.hpp"

namespace rgasp {

struct FitOptions {
  PriorChoice prior = PriorChoice::kJointlyRobust;
  NuggetSpec nugget = NuggetSpec::noise_free();
  bool lower_bound = true;
  bool multiple_starts = false;
  int max_eval = 30;
  double xtol_rel = 1e-5;
  int optimizer_memory = 10;
  ScaleRule prior_scale = ScaleRule::kRangeOverRootN;
  int threads = 1;
};

struct StartDiagnostics {
  Eigen::VectorXd initial;  // log-parameters
  Eigen::VectorXd final;
  double objective = 0.0;
  int evaluations = 0;
  int iterations = 0;
  std::string status;
  std::string message;  // set when the start failed
  bool ok = false;
  bool extended = false;  // optimum followed a flat ridge toward the boundary
};

struct FitDiagnostics {
  std::vector<StartDiagnostics> starts;
  int best_start = -1;
  double objective = 0.0;  // log marginal likelihood + log prior at the optimum
  bool at_lower_bound = false;
  bool degenerate = false;  // objective flat toward a boundary of the parameter space
  double wall_seconds = 0.0;
};

/// Fitted emulator state shared by the scalar and the multi-output model.
/// `response` is n x k; the scalar model has k = 1.
struct Emulator {
  Eigen::MatrixXd design;
  Eigen::MatrixXd response;
  TrendBasis trend;
  KernelSpec kernel;
  FitOptions options;
  JRPriorParams prior_params;
  Eigen::VectorXd beta_lower;  // default lower bounds, whether or not enforced

  Eigen::VectorXd beta_hat;
  double eta_hat = 0.0;
  Eigen::MatrixXd theta_hat;   // q x k
  Eigen::VectorXd sigma2_hat;  // k
  FitDiagnostics diagnostics;

  // Cached at (beta_hat, eta_hat); rebuilt by refresh_cache().
  DistanceTensor<double> dist;
  MarginalState state;

  Eigen::Index n() const { return design.rows(); }
  Eigen::Index p() const { return design.cols(); }
  Eigen::Index q() const { return state.q; }
  Eigen::Index k() const { return response.cols(); }
  Eigen::VectorXd gamma_hat() const { return beta_hat.cwiseInverse(); }
};

struct GaSPModel : Emulator {
  Eigen::VectorXd theta() const { return theta_hat.col(0); }
  double sigma2() const { return sigma2_hat[0]; }
  Eigen::VectorXd y() const { return response.col(0); }
};

/// beta_l^min = -log(0.99) / (p C_l) with C_l the mean pairwise distance:
/// at the bound the correlation at mean distances is at most 0.99.
Eigen::VectorXd default_lower_bound(const Eigen::MatrixXd& design);

/// Optimizer starting points in (log beta[, log eta]). The first uses 50x
/// the lower bound and eta = 1e-4; the second, used with multiple starts,
/// uses half the JR prior coordinate mean (a + p) / (b p C_l) and eta = 2e-4.
std::vector<Eigen::VectorXd> initial_points(const JRPriorParams& params, const Eigen::VectorXd& beta_lower,
                                            const NuggetSpec& nugget, bool multiple_starts);

/// Log marginal posterior (likelihood plus log prior) and its gradient at
/// log-parameters `omega`. Returns -inf when R~ cannot be factorized.
double log_posterior(const Emulator& skeleton, const Eigen::MatrixXd& basis, const Eigen::VectorXd& omega,
                     Eigen::VectorXd* grad);

/// Just the log prior term at log-parameters omega (requires the state built at omega).
double log_prior_value(const Emulator& skeleton, const MarginalState& state);

/// Posterior-mode fit of a scalar-output emulator.
GaSPModel fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& response, const TrendBasis& trend,
              const KernelSpec& spec, const FitOptions& options = {});

/// Same as fit() with the prior switched off; degenerate optima are
/// reported in the diagnostics rather than raised.
GaSPModel fit_flat_mode(const Eigen::MatrixXd& design, const Eigen::VectorXd& response, const TrendBasis& trend,
                        const KernelSpec& spec, FitOptions options = {});

/// Shared-correlation fit for an n x k response (used by the multi-output model).
Emulator fit_emulator(const Eigen::MatrixXd& design, const Eigen::MatrixXd& response, const TrendBasis& trend,
                      const KernelSpec& spec, const FitOptions& options);

/// Emulator with fixed parameters (no optimization), e.g. for loading or
/// for diagnostics at known values.
Emulator make_emulator(const Eigen::MatrixXd& design, const Eigen::MatrixXd& response, const TrendBasis& trend,
                       const KernelSpec& spec, const FitOptions& options, const Eigen::VectorXd& beta, double eta);

/// Recomputes distances, the marginal state, theta_hat and sigma2_hat from
/// (beta_hat, eta_hat).
void refresh_cache(Emulator& model);

}  // namespace rgasp
