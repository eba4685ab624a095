#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "robustgasp/errors.hpp"
#include "robustgasp/ppgasp.hpp"
#include "robustgasp/testbed.hpp"

using namespace rgasp;

namespace {

Eigen::MatrixXd field(const Eigen::MatrixXd& x, int k, std::uint64_t seed) {
  Eigen::MatrixXd y(x.rows(), k);
  const Eigen::VectorXd shift = rgasp::testing::random_vector(k, seed, 0.0, 3.0);
  for (int j = 0; j < k; ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      y(i, j) = std::sin(5.0 * x(i, 0) + shift[j]) + x(i, x.cols() - 1) * std::cos(3.0 * x(i, 0) - shift[j]);
    }
  }
  return y;
}

}  // namespace

TEST(PPGaSP, SingleColumnMatchesScalarModel) {
  const Eigen::MatrixXd x = maximin_lhs(20, 2, 3).points;
  const Eigen::VectorXd y = rgasp::testing::wavy_response(x);
  const GaSPModel s = fit(x, y, TrendBasis::constant(), KernelSpec::uniform(2));
  const PPGaSPModel pp = fit_ppgasp(x, y, TrendBasis::constant(), KernelSpec::uniform(2));
  EXPECT_LT(rgasp::testing::relative_error(pp.beta_hat, s.beta_hat), 1e-10);
  const Eigen::MatrixXd xt = rgasp::testing::random_design(15, 2, 4);
  const PredictiveSummary ps = predict(s, xt);
  const PPPredictiveSummary pq = predict_ppgasp(pp, xt);
  EXPECT_LT((ps.mean - pq.mean.col(0)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((ps.sd - pq.sd.col(0)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((ps.lower95 - pq.lower95.col(0)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_EQ(ps.dof, pq.dof);
}

TEST(PPGaSP, DuplicatedColumnsShareEverything) {
  const Eigen::MatrixXd x = maximin_lhs(20, 2, 3).points;
  const Eigen::VectorXd y = rgasp::testing::wavy_response(x);
  Eigen::MatrixXd yy(20, 2);
  yy << y, y;
  const PPGaSPModel pp = fit_ppgasp(x, yy, TrendBasis::constant(), KernelSpec::uniform(2));
  EXPECT_DOUBLE_EQ(pp.sigma2_hat[0], pp.sigma2_hat[1]);
  const PPPredictiveSummary pr = predict_ppgasp(pp, rgasp::testing::random_design(10, 2, 5));
  EXPECT_LT((pr.mean.col(0) - pr.mean.col(1)).norm(), 1e-14);
  EXPECT_LT((pr.sd.col(0) - pr.sd.col(1)).norm(), 1e-14);
}

TEST(PPGaSP, PooledObjectiveIsSumOfColumns) {
  const Eigen::MatrixXd x = rgasp::testing::random_design(12, 2, 6);
  const Eigen::MatrixXd y = field(x, 5, 7);
  const KernelSpec spec = KernelSpec::uniform(2);
  const auto dist = distances(x, x);
  const Eigen::MatrixXd h = eval_basis(TrendBasis::linear(), x);
  const Eigen::Vector2d beta(2.0, 3.5);
  const double pooled = log_marginal_lik(build_state(dist, y, h, spec, beta, 0.01));
  double total = 0.0;
  for (int j = 0; j < 5; ++j) total += log_marginal_lik(build_state(dist, y.col(j), h, spec, beta, 0.01));
  EXPECT_NEAR(pooled, total, 1e-10 * std::max(1.0, std::abs(total)));
}

TEST(PPGaSP, PooledGradientMatchesFiniteDifferences) {
  const Eigen::MatrixXd x = rgasp::testing::random_design(12, 2, 8);
  const Eigen::MatrixXd y = field(x, 5, 9);
  const KernelSpec spec = KernelSpec::uniform(2);
  const auto dist = distances(x, x);
  const Eigen::MatrixXd h = eval_basis(TrendBasis::constant(), x);
  const Eigen::Vector3d omega(std::log(2.0), std::log(3.0), std::log(0.02));
  auto objective = [&](const Eigen::VectorXd& w) {
    return log_marginal_lik(build_state(dist, y, h, spec, w.head(2).array().exp().matrix(), std::exp(w[2])));
  };
  const MarginalState state = build_state(dist, y, h, spec, omega.head(2).array().exp().matrix(), std::exp(omega[2]));
  const Eigen::VectorXd g = log_marginal_lik_grad(state, dist, spec, true);
  const Eigen::VectorXd fd = rgasp::testing::central_difference(objective, omega, 1e-5);
  EXPECT_LT(rgasp::testing::relative_error(g, fd), 1e-6);
}

TEST(PPGaSP, ColumnScalingIsEquivariant) {
  const Eigen::MatrixXd x = maximin_lhs(20, 2, 11).points;
  const Eigen::MatrixXd y = field(x, 3, 12);
  Eigen::MatrixXd scaled = y;
  scaled.col(1) *= 100.0;
  const PPGaSPModel a = fit_ppgasp(x, y, TrendBasis::constant(), KernelSpec::uniform(2));
  const PPGaSPModel b = fit_ppgasp(x, scaled, TrendBasis::constant(), KernelSpec::uniform(2));
  EXPECT_LT(rgasp::testing::relative_error(a.beta_hat, b.beta_hat), 1e-4);
  const Eigen::MatrixXd xt = rgasp::testing::random_design(10, 2, 13);
  const PPPredictiveSummary pa = predict_ppgasp(a, xt), pb = predict_ppgasp(b, xt);
  EXPECT_LT((pb.mean.col(1) - 100.0 * pa.mean.col(1)).cwiseAbs().maxCoeff(), 1e-3);
  EXPECT_LT((pb.mean.col(0) - pa.mean.col(0)).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(PPGaSP, InterpolatesDesignPoints) {
  const Eigen::MatrixXd x = maximin_lhs(20, 2, 14).points;
  const Eigen::MatrixXd y = field(x, 4, 15);
  const PPGaSPModel pp = fit_ppgasp(x, y, TrendBasis::constant(), KernelSpec::uniform(2));
  const PPPredictiveSummary pr = predict_ppgasp(pp, x);
  EXPECT_LT((pr.mean - y).cwiseAbs().maxCoeff(), 1e-7);
  EXPECT_LT(pr.sd.maxCoeff(), 1e-5);
}

TEST(PPGaSP, PoolingImprovesRangeEstimates) {
  const Eigen::Vector2d beta(3.0, 5.0);
  const KernelSpec spec = KernelSpec::uniform(2);
  std::vector<double> single, pooled;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Eigen::MatrixXd x = maximin_lhs(30, 2, seed).points;
    const Eigen::MatrixXd y = sample_gp(x, spec, beta, 0.0, 50, 100 + seed);
    const GaSPModel s = fit(x, y.col(0), TrendBasis::constant(), spec);
    const PPGaSPModel pp = fit_ppgasp(x, y, TrendBasis::constant(), spec);
    single.push_back((s.beta_hat.array().log() - beta.array().log()).abs().sum());
    pooled.push_back((pp.beta_hat.array().log() - beta.array().log()).abs().sum());
  }
  std::sort(single.begin(), single.end());
  std::sort(pooled.begin(), pooled.end());
  EXPECT_LT(pooled[5], single[5]);
}

TEST(PPGaSP, PredictionCostScalesWithOutputs) {
  const Eigen::MatrixXd x = maximin_lhs(50, 2, 21).points;
  const KernelSpec spec = KernelSpec::uniform(2);
  const Eigen::MatrixXd y = sample_gp(x, spec, Eigen::Vector2d(3, 5), 0.0, 2000, 22);
  const PPGaSPModel small = fit_ppgasp(x, y.leftCols(1000), TrendBasis::constant(), spec);
  PPGaSPModel large = small;
  large.response = y;
  refresh_cache(large);
  const Eigen::MatrixXd xt = rgasp::testing::random_design(20, 2, 23);
  auto best_time = [&](const PPGaSPModel& m) {
    double best = 1e300;
    for (int r = 0; r < 5; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      const PPPredictiveSummary out = predict_ppgasp(m, xt);
      const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      EXPECT_EQ(out.mean.cols(), m.k());
      best = std::min(best, dt);
    }
    return best;
  };
  const double t1 = best_time(small);
  const double t2 = best_time(large);
  EXPECT_LE(t2, 2.5 * t1 + 1e-3);
}

TEST(PPGaSP, ConstantColumnIsNamed) {
  const Eigen::MatrixXd x = maximin_lhs(10, 1, 2).points;
  Eigen::MatrixXd y = field(x, 3, 3);
  y.col(2).setConstant(4.0);
  try {
    fit_ppgasp(x, y, TrendBasis::constant(), KernelSpec::uniform(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateResponse);
    EXPECT_NE(std::string(e.what()).find("3"), std::string::npos) << e.what();
  }
}
