#include <cmath>

#include <boost/math/quadrature/sinh_sinh.hpp>
#include <gtest/gtest.h>

#include "helpers.hpp"
#include "robustgasp/errors.hpp"
#include "robustgasp/marginal.hpp"
#include "robustgasp/testbed.hpp"

using namespace rgasp;
using rgasp::testing::family_for;

namespace {

const KernelSpec kGauss1 = KernelSpec::uniform(1, KernelFamily::kPowerExponential, 2.0);

Eigen::MatrixXd two_points() {
  Eigen::MatrixXd x(2, 1);
  x << 0.0, 1.0;
  return x;
}

double lik_at(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const TrendBasis& trend, const KernelSpec& spec,
              const Eigen::VectorXd& omega, bool with_eta) {
  const Eigen::Index p = spec.dims();
  const Eigen::VectorXd beta = omega.head(p).array().exp();
  const double eta = with_eta ? std::exp(omega[p]) : 0.0;
  return log_marginal_lik(build_state(distances(x, x), y, eval_basis(trend, x), spec, beta, eta));
}

// log of the double integral over (theta, sigma^2) of N(y; theta 1, sigma^2 R) / sigma^2.
double log_marginal_by_quadrature(const Eigen::MatrixXd& r, const Eigen::VectorXd& y) {
  const Eigen::Index n = y.size();
  const Eigen::MatrixXd r_inv = r.inverse();
  const double log_det = std::log(r.determinant());
  const double center = y.mean();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const double s0 = std::max((y.array() - center).square().mean(), 1e-12);
  boost::math::quadrature::sinh_sinh<double> rule;
  // sigma^2 = s0 e^u, theta = center + sigma z
  const auto inner = [&](double u) {
    const double s2 = s0 * std::exp(u);
    const double sd = std::sqrt(s2);
    const auto density = [&](double z) {
      const Eigen::VectorXd e = y - (center + sd * z) * ones;
      const double log_density = -0.5 * e.dot(r_inv * e) / s2 - 0.5 * n * std::log(2 * M_PI * s2) - 0.5 * log_det;
      return std::isfinite(log_density) ? std::exp(log_density) * sd : 0.0;
    };
    return rule.integrate(density, 1e-12);
  };
  return std::log(rule.integrate(inner, 1e-11));
}

}  // namespace

TEST(Marginal, ResponseInTrendSpanHasZeroS2) {
  const MarginalState s =
      build_state(two_points(), Eigen::Vector2d(0, 0), TrendBasis::constant(), kGauss1, Eigen::VectorXd::Ones(1), 0.0);
  EXPECT_EQ(s.S2[0], 0.0);
  EXPECT_EQ(s.theta(0, 0), 0.0);
  EXPECT_THROW(log_marginal_lik(s), Error);
}

TEST(Marginal, TwoPointClosedForm) {
  const MarginalState s = build_state(two_points(), Eigen::Vector2d(1, -1), TrendBasis::constant(), kGauss1,
                                      Eigen::VectorXd::Ones(1), 0.0);
  const double e = std::exp(-1.0);
  EXPECT_NEAR(s.theta(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(s.S2[0], 2.0 / (1.0 - e), 1e-13);
  const double expected = -0.5 * std::log(1 - e * e) - 0.5 * std::log(2 / (1 + e)) - 0.5 * std::log(2 / (1 - e));
  EXPECT_NEAR(log_marginal_lik(s), expected, 1e-13);
}

TEST(Marginal, TwoPointGradientClosedForm) {
  // R = [[1, c], [c, 1]] with c = exp(-b^2); y = (1, -1), constant trend:
  // L(b) = -1/2 log(1 - c^2) - 1/2 log(2 / (1 + c)) - 1/2 log(2 / (1 - c)).
  const double b = 0.8, c = std::exp(-b * b), dc = -2.0 * b * c;
  const double dl = 0.5 * 2 * c * dc / (1 - c * c) + 0.5 * dc / (1 + c) - 0.5 * dc / (1 - c);
  const Eigen::VectorXd beta = Eigen::VectorXd::Constant(1, b);
  const MarginalState s =
      build_state(two_points(), Eigen::Vector2d(1, -1), TrendBasis::constant(), kGauss1, beta, 0.0);
  const auto x = two_points();
  const Eigen::VectorXd g = log_marginal_lik_grad(s, distances(x, x), kGauss1, false);
  EXPECT_NEAR(g[0], b * dl, 1e-12);
}

TEST(Marginal, IdentityLimit) {
  const Eigen::MatrixXd x = rgasp::testing::random_design(7, 1, 3);
  const Eigen::VectorXd y = rgasp::testing::random_vector(7, 4);
  const MarginalState s =
      build_state(x, y, TrendBasis::constant(), KernelSpec::uniform(1), Eigen::VectorXd::Constant(1, 1e8), 0.0);
  EXPECT_NEAR(s.S2[0], (y.array() - y.mean()).square().sum(), 1e-12);
}

TEST(Marginal, StateInvariants) {
  const Eigen::MatrixXd x = rgasp::testing::random_design(9, 2, 5);
  const Eigen::VectorXd y = rgasp::testing::random_vector(9, 6);
  const Eigen::Vector2d beta(2.0, 3.5);
  const double eta = 0.05;
  const MarginalState s = build_state(x, y, TrendBasis::linear(), KernelSpec::uniform(2), beta, eta);
  Eigen::MatrixXd rt = corr_matrix(x, x, KernelSpec::uniform(2), beta);
  rt.diagonal().array() += eta;
  const Eigen::MatrixXd h = eval_basis(TrendBasis::linear(), x);
  const Eigen::MatrixXd ri = rt.inverse();
  const Eigen::VectorXd theta = (h.transpose() * ri * h).inverse() * h.transpose() * ri * y;
  const Eigen::MatrixXd q = ri - ri * h * (h.transpose() * ri * h).inverse() * h.transpose() * ri;
  EXPECT_LT((s.theta.col(0) - theta).norm(), 1e-9);
  EXPECT_NEAR(s.S2[0], y.dot(q * y), 1e-9);
  EXPECT_LT((s.Qy.col(0) - q * y).norm(), 1e-8);
  EXPECT_LT((projection_q(s) - q).norm(), 1e-8 * q.norm());
}

TEST(Marginal, PermutationInvariance) {
  const Eigen::MatrixXd x = rgasp::testing::random_design(8, 2, 15);
  const Eigen::VectorXd y = rgasp::testing::random_vector(8, 16);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(8);
  perm.setIdentity();
  std::mt19937_64 rng(2);
  std::shuffle(perm.indices().data(), perm.indices().data() + 8, rng);
  const Eigen::Vector2d beta(1.5, 2.5);
  const double a = log_marginal_lik(build_state(x, y, TrendBasis::constant(), KernelSpec::uniform(2), beta, 0.0));
  const double b = log_marginal_lik(
      build_state(perm * x, Eigen::VectorXd(perm * y), TrendBasis::constant(), KernelSpec::uniform(2), beta, 0.0));
  EXPECT_NEAR(a, b, 1e-10 * std::abs(a));
}

TEST(Marginal, ResponseScalingShiftsByConstant) {
  const Eigen::MatrixXd x = rgasp::testing::random_design(8, 1, 21);
  const Eigen::VectorXd y = rgasp::testing::random_vector(8, 22);
  const double c = -3.7;
  for (double b : {0.5, 2.0, 7.0}) {
    const Eigen::VectorXd beta = Eigen::VectorXd::Constant(1, b);
    const double l1 = log_marginal_lik(build_state(x, y, TrendBasis::constant(), KernelSpec::uniform(1), beta, 0.0));
    const double l2 =
        log_marginal_lik(build_state(x, Eigen::VectorXd(c * y), TrendBasis::constant(), KernelSpec::uniform(1), beta, 0.0));
    EXPECT_NEAR(l2 - l1, -(8 - 1) * std::log(std::abs(c)), 1e-10);
  }
}

TEST(Marginal, GradientMatchesFiniteDifferences) {
  for (int t = 0; t < 20; ++t) {
    const int p = 1 + t % 3;
    const bool with_eta = t % 2 == 1;
    const Eigen::MatrixXd x = lhs(15, p, 500 + t).points;
    const Eigen::MatrixXd y = rgasp::testing::random_vector(15, 600 + t);
    const KernelSpec spec = KernelSpec::uniform(p, family_for(t));
    Eigen::VectorXd omega = rgasp::testing::random_vector(p + (with_eta ? 1 : 0), 700 + t, -0.5, 1.5);
    if (with_eta) omega[p] = -3.0 + omega[p];
    const Eigen::VectorXd beta = omega.head(p).array().exp();
    const double eta = with_eta ? std::exp(omega[p]) : 0.0;
    const auto dist = distances(x, x);
    const MarginalState s = build_state(dist, y, eval_basis(TrendBasis::constant(), x), spec, beta, eta);
    const Eigen::VectorXd g = log_marginal_lik_grad(s, dist, spec, with_eta);
    const Eigen::VectorXd fd = rgasp::testing::central_difference(
        [&](const Eigen::VectorXd& w) { return lik_at(x, y, TrendBasis::constant(), spec, w, with_eta); }, omega, 1e-4);
    EXPECT_LT(rgasp::testing::relative_error(g, fd), 1e-4) << "instance " << t;
  }
}

TEST(Marginal, MatchesQuadratureUpToConstant) {
  std::vector<double> offsets;
  for (int t = 0; t < 3; ++t) {
    const Eigen::MatrixXd x = rgasp::testing::random_design(4, 1, 800 + t);
    const Eigen::VectorXd y = rgasp::testing::random_vector(4, 900 + t);
    const Eigen::VectorXd beta = Eigen::VectorXd::Constant(1, 1.0 + t);
    const MarginalState s = build_state(x, y, TrendBasis::constant(), KernelSpec::uniform(1), beta, 0.0);
    const double quad = log_marginal_by_quadrature(corr_matrix(x, x, KernelSpec::uniform(1), beta), y);
    offsets.push_back(log_marginal_lik(s) - quad);
  }
  EXPECT_LT(std::abs(offsets[0] - offsets[1]), 1e-3);
  EXPECT_LT(std::abs(offsets[0] - offsets[2]), 1e-3);
  EXPECT_LT(std::abs(offsets[1] - offsets[2]), 1e-3);
}

TEST(Marginal, FailedFactorizationNamesParameters) {
  Eigen::MatrixXd x(3, 1);
  x << 0.0, 0.5, 0.5;
  try {
    build_state(x, Eigen::Vector3d(1, 2, 3), TrendBasis::constant(), KernelSpec::uniform(1), Eigen::VectorXd::Ones(1), 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNearSingularCorrelation);
    EXPECT_NE(std::string(e.what()).find("beta"), std::string::npos);
  }
}

TEST(Marginal, SmallNuggetAlwaysFactorizes) {
  for (int n : {10, 50, 200}) {
    const Eigen::MatrixXd x = rgasp::testing::random_design(n, 1, 1000 + n);
    const Eigen::VectorXd y = rgasp::testing::random_vector(n, 1100 + n);
    EXPECT_NO_THROW(build_state(x, y, TrendBasis::constant(), KernelSpec::uniform(1), Eigen::VectorXd::Constant(1, 0.01), 1e-8));
  }
}
