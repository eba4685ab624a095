#include "robustgasp/marginal.hpp"

#include <cmath>
#include <sstream>

#include "robustgasp/errors.hpp"

namespace rgasp {

namespace {

std::string describe_point(const Eigen::VectorXd& beta, double eta) {
  std::ostringstream os;
  os.precision(6);
  os << "beta = (";
  for (Eigen::Index l = 0; l < beta.size(); ++l) os << (l ? ", " : "") << beta[l];
  os << "), eta = " << eta;
  return os.str();
}

bool factor_ok(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  if (llt.info() != Eigen::Success) return false;
  const auto diag = llt.matrixLLT().diagonal();
  return diag.allFinite() && (diag.array() > 0.0).all();
}

double log_det_from(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace

MarginalState build_state(const DistanceTensor<double>& dist, const Eigen::MatrixXd& response,
                          const Eigen::MatrixXd& basis, const KernelSpec& spec, const Eigen::VectorXd& beta,
                          double eta) {
  require(std::isfinite(eta) && eta >= 0.0, "nugget-variance ratio must be finite and non-negative");
  MarginalState s;
  s.n = response.rows();
  s.k = response.cols();
  s.q = basis.cols();
  require(basis.rows() == s.n, "trend basis rows do not match the number of observations");
  require(!dist.empty() && dist.front().rows() == s.n, "distance tensor does not match the number of observations");
  check_degrees_of_freedom(s.n, s.q);
  s.beta = beta;
  s.eta = eta;
  s.corr = corr_matrix(dist, spec, beta);

  Eigen::MatrixXd tilde = s.corr;
  tilde.diagonal().array() += eta;
  s.chol.compute(tilde);
  if (!factor_ok(s.chol)) {
    fail(ErrorCode::kNearSingularCorrelation,
         "correlation matrix is numerically singular at " + describe_point(beta, eta) +
             "; consider estimating a nugget (--nugget-est)");
  }
  s.log_det_R = log_det_from(s.chol);

  s.H = basis;
  Eigen::MatrixXd resid = response;
  if (s.q > 0) {
    s.rinv_h = s.chol.solve(basis);
    const Eigen::MatrixXd g = basis.transpose() * s.rinv_h;
    s.gram.compute(g);
    const auto gd = s.gram.matrixLLT().diagonal();
    if (!factor_ok(s.gram) || gd.minCoeff() < 1e-7 * gd.maxCoeff()) {
      fail(ErrorCode::kInvalidArgument, "trend basis is rank deficient (H^T R^{-1} H is not invertible)");
    }
    s.log_det_G = log_det_from(s.gram);
    s.theta = s.gram.solve(s.rinv_h.transpose() * response);
    resid -= basis * s.theta;
  } else {
    s.rinv_h.resize(s.n, 0);
    s.theta.resize(0, s.k);
    s.log_det_G = 0.0;
  }

  // S2_j = |L^{-1} r_j|^2 and Qy = L^{-T} L^{-1} r.
  Eigen::MatrixXd z = s.chol.matrixL().solve(resid);
  s.S2 = z.colwise().squaredNorm().transpose();
  s.Qy = s.chol.matrixU().solve(z);
  return s;
}

MarginalState build_state(const Eigen::MatrixXd& design, const Eigen::VectorXd& response, const TrendBasis& trend,
                          const KernelSpec& spec, const Eigen::VectorXd& beta, double eta) {
  require(design.rows() == response.size(), "design and response have different numbers of rows");
  return build_state(distances(design, design), Eigen::MatrixXd(response), eval_basis(trend, design), spec, beta,
                     eta);
}

double log_marginal_lik(const MarginalState& state) {
  for (Eigen::Index j = 0; j < state.k; ++j) {
    if (!(state.S2[j] > 0.0) || !std::isfinite(state.S2[j])) {
      fail(ErrorCode::kDegenerateResponse,
           "residual sum of squares S2 is zero for response column " + std::to_string(j + 1) +
               "; the response lies in the span of the trend");
    }
  }
  const double shared = -0.5 * state.log_det_R - 0.5 * state.log_det_G;
  return static_cast<double>(state.k) * shared -
         0.5 * static_cast<double>(state.dof()) * state.S2.array().log().sum();
}

Eigen::VectorXd log_marginal_lik_grad(const MarginalState& state, const DistanceTensor<double>& dist,
                                      const KernelSpec& spec, bool with_eta) {
  const Eigen::Index p = spec.dims();
  const double k = static_cast<double>(state.k);
  const double half_dof = 0.5 * static_cast<double>(state.dof());
  Eigen::VectorXd grad(p + (with_eta ? 1 : 0));

  // For each direction: -1/2 tr(R~^{-1} Rdot) + 1/2 tr(G^{-1} (R~^{-1}H)^T Rdot R~^{-1}H)
  // shared by all columns, plus (n-q)/2 Qy_j^T Rdot Qy_j / S2_j per column.
  auto directional = [&](double trace_rinv_rdot, const Eigen::MatrixXd& h_term, const Eigen::VectorXd& quad) {
    double trend_term = 0.0;
    if (state.q > 0) trend_term = state.gram.solve(h_term).trace();
    return k * (-0.5 * trace_rinv_rdot + 0.5 * trend_term) + half_dof * (quad.array() / state.S2.array()).sum();
  };

  for (Eigen::Index l = 0; l < p; ++l) {
    const Eigen::MatrixXd rdot = corr_matrix_deriv(dist, spec, state.beta, l, state.corr);
    const double tr = state.chol.solve(rdot).trace();
    Eigen::MatrixXd h_term;
    if (state.q > 0) h_term = state.rinv_h.transpose() * rdot * state.rinv_h;
    const Eigen::VectorXd quad = (state.Qy.cwiseProduct(rdot * state.Qy)).colwise().sum().transpose();
    grad[l] = state.beta[l] * directional(tr, h_term, quad);
  }

  if (with_eta) {
    const Eigen::MatrixXd linv =
        state.chol.matrixL().solve(Eigen::MatrixXd::Identity(state.n, state.n));
    const double tr = linv.squaredNorm();
    Eigen::MatrixXd h_term;
    if (state.q > 0) h_term = state.rinv_h.transpose() * state.rinv_h;
    const Eigen::VectorXd quad = state.Qy.colwise().squaredNorm().transpose();
    grad[p] = state.eta * directional(tr, h_term, quad);
  }
  return grad;
}

Eigen::MatrixXd projection_q(const MarginalState& state) {
  Eigen::MatrixXd q = state.chol.solve(Eigen::MatrixXd::Identity(state.n, state.n));
  if (state.q > 0) q -= state.rinv_h * state.gram.solve(state.rinv_h.transpose());
  return q;
}

}  // namespace rgasp
