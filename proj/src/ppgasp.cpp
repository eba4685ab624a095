#include "robustgasp/ppgasp.hpp"

#include <cmath>

#include "robustgasp/errors.hpp"

namespace rgasp {

PPGaSPModel fit_ppgasp(const Eigen::MatrixXd& design, const Eigen::MatrixXd& response, const TrendBasis& trend,
                       const KernelSpec& spec, const FitOptions& options) {
  PPGaSPModel model;
  static_cast<Emulator&>(model) = fit_emulator(design, response, trend, spec, options);
  return model;
}

PPPredictiveSummary predict_ppgasp(const PPGaSPModel& model, const Eigen::MatrixXd& testing_input,
                                   const std::optional<Eigen::MatrixXd>& testing_trend, SdKind sd_kind) {
  const PredictiveCore core = predictive_core(model, testing_input, testing_trend);
  const double dof = static_cast<double>(model.state.dof());
  const double t = t_quantile(dof, 0.975);

  const Eigen::MatrixXd scale = (core.c_star * model.sigma2_hat.transpose()).cwiseSqrt();
  PPPredictiveSummary out;
  out.dof = dof;
  out.mean = core.mean;
  out.lower95 = core.mean - t * scale;
  out.upper95 = core.mean + t * scale;
  if (sd_kind == SdKind::kStudentT && dof > 2.0) {
    out.sd = scale * std::sqrt(dof / (dof - 2.0));
  } else {
    out.sd = scale;
    out.sd_is_scale = true;
  }
  return out;
}

}  // namespace rgasp
