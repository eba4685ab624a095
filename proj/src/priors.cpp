#include "robustgasp/priors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "robustgasp/errors.hpp"

namespace rgasp {

const char* to_string(PriorChoice prior) {
  switch (prior) {
    case PriorChoice::kJointlyRobust: return "jr";
    case PriorChoice::kRefGamma: return "ref_gamma";
    case PriorChoice::kRefXi: return "ref_xi";
    case PriorChoice::kFlat: return "flat";
  }
  return "unknown";
}

PriorChoice parse_prior_choice(const std::string& name) {
  if (name == "jr" || name == "ref_approx") return PriorChoice::kJointlyRobust;
  if (name == "ref_gamma") return PriorChoice::kRefGamma;
  if (name == "ref_xi") return PriorChoice::kRefXi;
  if (name == "flat") return PriorChoice::kFlat;
  fail(ErrorCode::kInvalidArgument, "unknown prior '" + name + "' (expected jr, ref_gamma, ref_xi or flat)");
}

const char* to_string(ScaleRule rule) {
  switch (rule) {
    case ScaleRule::kRangeOverRootN: return "range";
    case ScaleRule::kMeanPairwise: return "mean_pairwise";
  }
  return "unknown";
}

ScaleRule parse_scale_rule(const std::string& name) {
  if (name == "range") return ScaleRule::kRangeOverRootN;
  if (name == "mean_pairwise") return ScaleRule::kMeanPairwise;
  fail(ErrorCode::kInvalidArgument, "unknown prior scale rule '" + name + "' (expected range or mean_pairwise)");
}

Eigen::VectorXd mean_pairwise_distance(const Eigen::MatrixXd& design) {
  const Eigen::Index n = design.rows();
  require(n >= 2, "scale constants need at least two design points");
  // Sorting gives sum_{i<j} |x_i - x_j| = sum_i (2i - n + 1) x_(i) in O(n log n).
  Eigen::VectorXd out(design.cols());
  for (Eigen::Index l = 0; l < design.cols(); ++l) {
    Eigen::VectorXd col = design.col(l);
    std::sort(col.data(), col.data() + n);
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) total += static_cast<double>(2 * i - n + 1) * col[i];
    out[l] = 2.0 * total / static_cast<double>(n * (n - 1));
  }
  return out;
}

Eigen::VectorXd design_scales(const Eigen::MatrixXd& design, ScaleRule rule) {
  const Eigen::Index n = design.rows();
  const Eigen::Index p = design.cols();
  require(n >= 2 && p >= 1, "scale constants need at least two design points and one input");
  Eigen::VectorXd c(p);
  if (rule == ScaleRule::kMeanPairwise) {
    c = mean_pairwise_distance(design);
  } else {
    const double shrink = std::pow(static_cast<double>(n), 1.0 / static_cast<double>(p));
    c = (design.colwise().maxCoeff() - design.colwise().minCoeff()).transpose() / shrink;
  }
  for (Eigen::Index l = 0; l < p; ++l) {
    if (!(c[l] > 0.0)) {
      fail(ErrorCode::kZeroScale,
           "input dimension " + std::to_string(l + 1) + " has all-equal coordinates; its scale constant is zero");
    }
  }
  return c;
}

JRPriorParams default_jr_params(const Eigen::MatrixXd& design, ScaleRule rule) {
  JRPriorParams params;
  const double n = static_cast<double>(design.rows());
  const double p = static_cast<double>(design.cols());
  params.a = 0.2;
  params.b = std::pow(n, -1.0 / p) * (params.a + p);
  params.C = design_scales(design, rule);
  return params;
}

double log_jr_prior(const Eigen::VectorXd& beta, double eta, bool with_eta, const JRPriorParams& params) {
  require(beta.size() == params.C.size(), "JR prior: beta and C have different lengths");
  const double t = params.C.dot(beta);
  if (!(t > 0.0)) return -std::numeric_limits<double>::infinity();
  return params.a * std::log(t) - params.b * (t + (with_eta ? eta : 0.0));
}

Eigen::VectorXd log_jr_prior_grad(const Eigen::VectorXd& beta, double eta, bool with_eta,
                                  const JRPriorParams& params) {
  const Eigen::Index p = beta.size();
  const double t = params.C.dot(beta);
  Eigen::VectorXd grad(p + (with_eta ? 1 : 0));
  grad.head(p) = (beta.array() * params.C.array() * (params.a / t - params.b)).matrix();
  if (with_eta) grad[p] = -params.b * eta;
  return grad;
}

Eigen::MatrixXd ref_fisher_information(const MarginalState& state, const DistanceTensor<double>& dist,
                                       const KernelSpec& spec, RefParameterization param, bool with_eta) {
  const Eigen::Index p = spec.dims();
  const Eigen::Index m = p + (with_eta ? 1 : 0);
  const Eigen::MatrixXd q = projection_q(state);

  std::vector<Eigen::MatrixXd> w(static_cast<std::size_t>(m));
  for (Eigen::Index l = 0; l < p; ++l) {
    Eigen::MatrixXd rdot = corr_matrix_deriv(dist, spec, state.beta, l, state.corr);
    // dR/dgamma = -beta^2 dR/dbeta, dR/dxi = beta dR/dbeta
    const double b = state.beta[l];
    rdot *= (param == RefParameterization::kGamma) ? -b * b : b;
    w[static_cast<std::size_t>(l)] = rdot * q;
  }
  if (with_eta) w[static_cast<std::size_t>(p)] = q;

  Eigen::MatrixXd info(m + 1, m + 1);
  info(0, 0) = static_cast<double>(state.dof());
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& wi = w[static_cast<std::size_t>(i)];
    info(0, i + 1) = info(i + 1, 0) = wi.trace();
    for (Eigen::Index j = i; j < m; ++j) {
      // tr(W_i W_j) = sum_{ab} W_i(a,b) W_j(b,a)
      const double v = wi.cwiseProduct(w[static_cast<std::size_t>(j)].transpose()).sum();
      info(i + 1, j + 1) = info(j + 1, i + 1) = v;
    }
  }
  if (!info.allFinite()) fail(ErrorCode::kNumericalFailure, "reference prior: non-finite Fisher information entries");
  return info;
}

double log_ref_prior(const MarginalState& state, const DistanceTensor<double>& dist, const KernelSpec& spec,
                     RefParameterization param, bool with_eta) {
  const Eigen::MatrixXd info = ref_fisher_information(state, dist, spec, param, with_eta);
  Eigen::LLT<Eigen::MatrixXd> llt(info);
  if (llt.info() != Eigen::Success || !(llt.matrixLLT().diagonal().array() > 0.0).all()) {
    return -std::numeric_limits<double>::infinity();
  }
  return llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace rgasp
