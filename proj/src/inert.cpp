#include "robustgasp/inert.hpp"

#include <cmath>

#include "robustgasp/errors.hpp"

namespace rgasp {

InertReport find_inert_inputs(const Emulator& model, double threshold) {
  require(threshold >= 0.0, "threshold must be non-negative");
  InertReport report;
  report.threshold = threshold;
  report.beta = model.beta_hat;
  report.C = model.prior_params.C;
  const Eigen::VectorXd weights = report.C.cwiseProduct(report.beta);
  const double total = weights.sum();
  require(total > 0.0 && std::isfinite(total), "inverse range parameters give a non-positive normalization");
  report.P = static_cast<double>(model.p()) * weights / total;
  for (Eigen::Index l = 0; l < report.P.size(); ++l) {
    if (report.P[l] < threshold) report.flagged.push_back(static_cast<int>(l + 1));
  }
  if (model.options.prior != PriorChoice::kJointlyRobust) {
    report.warning = std::string("model was fitted with prior '") + to_string(model.options.prior) +
                     "'; the screening rule is calibrated for the jr prior";
  }
  return report;
}

}  // namespace rgasp
