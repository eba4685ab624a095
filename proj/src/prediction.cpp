#include "robustgasp/prediction.hpp"

#include <cmath>
#include <random>

#include <boost/math/distributions/students_t.hpp>

#include "robustgasp/errors.hpp"

namespace rgasp {

namespace {

void check_input(const Emulator& model, const Eigen::MatrixXd& x) {
  require(x.cols() == model.p(), "testing input has " + std::to_string(x.cols()) + " columns, expected p = " +
                                     std::to_string(model.p()));
  require(x.allFinite(), "testing input contains non-finite values");
}

struct CrossTerms {
  Eigen::MatrixXd r;  // m x n
  Eigen::MatrixXd z;  // L^{-1} r^T, n x m
  Eigen::MatrixXd v;  // L_G^{-1} (H*^T - H^T R~^{-1} r^T), q x m
};

CrossTerms cross_terms(const Emulator& model, const Eigen::MatrixXd& x,
                       const std::optional<Eigen::MatrixXd>& testing_trend) {
  const MarginalState& s = model.state;
  CrossTerms t;
  t.r = corr_matrix(x, model.design, model.kernel, model.beta_hat);
  t.z = s.chol.matrixL().solve(t.r.transpose());
  if (s.q > 0) {
    const Eigen::MatrixXd h_star = eval_basis(model.trend, x, testing_trend);
    const Eigen::MatrixXd u = h_star.transpose() - s.rinv_h.transpose() * t.r.transpose();
    t.v = s.gram.matrixL().solve(u);
  } else {
    t.v.resize(0, x.rows());
  }
  return t;
}

}  // namespace

std::pair<Eigen::VectorXd, Eigen::VectorXd> PredictiveSummary::interval(double level) const {
  require(level > 0.0 && level < 1.0, "interval level must lie in (0, 1)");
  const double t = t_quantile(dof, 0.5 + 0.5 * level);
  return {mean - t * scale, mean + t * scale};
}

double t_quantile(double dof, double prob) {
  require(dof > 0.0, "degrees of freedom must be positive");
  return boost::math::quantile(boost::math::students_t_distribution<double>(dof), prob);
}

PredictiveCore predictive_core(const Emulator& model, const Eigen::MatrixXd& testing_input,
                               const std::optional<Eigen::MatrixXd>& testing_trend) {
  check_input(model, testing_input);
  require(model.state.dof() > 0, "degrees of freedom n - q must be positive");
  const MarginalState& s = model.state;
  const CrossTerms t = cross_terms(model, testing_input, testing_trend);

  PredictiveCore core;
  core.mean = t.r * s.Qy;
  if (s.q > 0) core.mean += eval_basis(model.trend, testing_input, testing_trend) * s.theta;
  core.c_star = (Eigen::VectorXd::Constant(testing_input.rows(), 1.0 + model.eta_hat) -
                 t.z.colwise().squaredNorm().transpose() + t.v.colwise().squaredNorm().transpose())
                    .cwiseMax(0.0);
  return core;
}

PredictiveSummary summarize(const Eigen::VectorXd& mean, const Eigen::VectorXd& scale, double dof, SdKind sd_kind) {
  PredictiveSummary out;
  out.mean = mean;
  out.scale = scale;
  out.dof = dof;
  const double t = t_quantile(dof, 0.975);
  out.lower95 = mean - t * scale;
  out.upper95 = mean + t * scale;
  if (sd_kind == SdKind::kStudentT && dof > 2.0) {
    out.sd = scale * std::sqrt(dof / (dof - 2.0));
  } else {
    out.sd = scale;
    out.sd_is_scale = true;
  }
  return out;
}

PredictiveSummary predict(const GaSPModel& model, const Eigen::MatrixXd& testing_input,
                          const std::optional<Eigen::MatrixXd>& testing_trend, SdKind sd_kind) {
  const PredictiveCore core = predictive_core(model, testing_input, testing_trend);
  const Eigen::VectorXd scale = (model.sigma2() * core.c_star).cwiseSqrt();
  return summarize(core.mean.col(0), scale, static_cast<double>(model.state.dof()), sd_kind);
}

Eigen::MatrixXd simulate(const GaSPModel& model, const Eigen::MatrixXd& testing_input, int num_sample,
                         std::uint64_t seed, const std::optional<Eigen::MatrixXd>& testing_trend) {
  require(num_sample >= 1, "num_sample must be at least 1");
  check_input(model, testing_input);
  const Eigen::Index m = testing_input.rows();
  const double dof = static_cast<double>(model.state.dof());
  require(dof > 0.0, "degrees of freedom n - q must be positive");

  const CrossTerms t = cross_terms(model, testing_input, testing_trend);
  Eigen::VectorXd mean = t.r * model.state.Qy.col(0);
  if (model.state.q > 0) mean += eval_basis(model.trend, testing_input, testing_trend) * model.theta();

  Eigen::MatrixXd c_star = corr_matrix(testing_input, testing_input, model.kernel, model.beta_hat);
  c_star.diagonal().array() += model.eta_hat;
  c_star -= t.z.transpose() * t.z;
  c_star += t.v.transpose() * t.v;
  c_star = 0.5 * (c_star + c_star.transpose());

  // Pivoted LDL^T tolerates the exactly singular rows of noise-free design points.
  Eigen::LDLT<Eigen::MatrixXd> ldlt(c_star);
  Eigen::VectorXd d = ldlt.vectorD();
  const double d_max = std::max(d.maxCoeff(), 1.0);
  if (!d.allFinite() || d.minCoeff() < -1e-8 * d_max) {
    fail(ErrorCode::kNumericalFailure,
         "predictive scale matrix is not positive semidefinite; separate near-duplicate test points or "
         "estimate a nugget");
  }
  d = d.cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXd factor = ldlt.matrixL();
  factor = factor * d.asDiagonal();
  factor = ldlt.transpositionsP().transpose() * factor;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::chi_squared_distribution<double> chi2(dof);
  const double sigma = std::sqrt(model.sigma2());

  Eigen::MatrixXd draws(m, num_sample);
  Eigen::VectorXd xi(m);
  for (int s = 0; s < num_sample; ++s) {
    for (Eigen::Index i = 0; i < m; ++i) xi[i] = normal(rng);
    const double w = chi2(rng) / dof;
    draws.col(s) = mean + (sigma / std::sqrt(w)) * (factor * xi);
  }
  return draws;
}

LooResult leave_one_out(const GaSPModel& model, SdKind sd_kind) {
  const MarginalState& s = model.state;
  require(s.n >= 3, "leave-one-out needs at least three design points");
  if (s.n - 1 <= s.q) {
    fail(ErrorCode::kDegreesOfFreedom, "leave-one-out folds have n - 1 = " + std::to_string(s.n - 1) +
                                           " observations but the trend has q = " + std::to_string(s.q));
  }
  const Eigen::VectorXd q_diag = projection_q(s).diagonal();
  const Eigen::VectorXd qy = s.Qy.col(0);
  const Eigen::VectorXd y = model.y();
  const double fold_dof = static_cast<double>(s.n - 1 - s.q);

  LooResult out;
  out.dof = fold_dof;
  const Eigen::VectorXd resid = qy.cwiseQuotient(q_diag);
  out.mean = y - resid;
  const Eigen::VectorXd s2_fold = (Eigen::VectorXd::Constant(s.n, s.S2[0]) - qy.cwiseProduct(resid)).cwiseMax(0.0);
  out.scale = (s2_fold / fold_dof).cwiseQuotient(q_diag).cwiseSqrt();
  out.std_resid = resid.cwiseQuotient(out.scale);
  out.sd = (sd_kind == SdKind::kStudentT && fold_dof > 2.0) ? Eigen::VectorXd(out.scale * std::sqrt(fold_dof / (fold_dof - 2.0)))
                                                            : out.scale;
  return out;
}

PredictionMetrics metrics(const Eigen::MatrixXd& mean, const Eigen::MatrixXd& lower, const Eigen::MatrixXd& upper,
                          const Eigen::MatrixXd& truth) {
  require(truth.size() > 0, "metrics need at least one test value");
  require(mean.rows() == truth.rows() && mean.cols() == truth.cols() && lower.rows() == truth.rows() &&
              lower.cols() == truth.cols() && upper.rows() == truth.rows() && upper.cols() == truth.cols(),
          "metrics: predictions and truth have different shapes");
  const double count = static_cast<double>(truth.size());
  PredictionMetrics out;
  out.rmse = std::sqrt((mean - truth).squaredNorm() / count);
  out.p_ci95 = ((lower.array() <= truth.array()) && (upper.array() >= truth.array())).cast<double>().sum() / count;
  out.l_ci95 = (upper - lower).sum() / count;
  return out;
}

PredictionMetrics metrics(const PredictiveSummary& predictions, const Eigen::VectorXd& truth) {
  return metrics(predictions.mean, predictions.lower95, predictions.upper95, truth);
}

}  // namespace rgasp
