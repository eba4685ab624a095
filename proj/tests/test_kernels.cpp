#include <cmath>
#include <random>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <gtest/gtest.h>

#include "helpers.hpp"
#include "robustgasp/errors.hpp"
#include "robustgasp/kernels.hpp"

using namespace rgasp;
using rgasp::testing::family_for;

namespace {

using Big = boost::multiprecision::cpp_dec_float_50;

Big matern52_big(Big d, Big gamma) {
  const Big r = sqrt(Big(5)) * d / gamma;
  return (1 + r + r * r / 3) * exp(-r);
}

}  // namespace

TEST(Kernels, ZeroDistanceIsOne) {
  for (int f = 0; f < 3; ++f) EXPECT_EQ(corr_1d(family_for(f), 1.9, 0.0, 1.0), 1.0);
}

TEST(Kernels, PowerExponentialAtUnitRatio) {
  EXPECT_NEAR(corr_1d(KernelFamily::kPowerExponential, 2.0, 0.7, 0.7), std::exp(-1.0), 1e-15);
}

TEST(Kernels, Matern52MatchesHighPrecisionFormula) {
  const double expected = static_cast<double>(matern52_big(Big(1), Big(1)));
  EXPECT_NEAR(corr_1d(KernelFamily::kMatern52, 0.0, 1.0, 1.0), expected, 1e-15);
  EXPECT_NEAR(expected, 0.52399, 1e-5);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(0.0, 4.0);
  for (int i = 0; i < 50; ++i) {
    const double d = unif(rng), g = 0.05 + unif(rng);
    const double oracle = static_cast<double>(matern52_big(Big(d), Big(g)));
    EXPECT_NEAR(corr_1d(KernelFamily::kMatern52, 0.0, d, g), oracle, 1e-14 * (1.0 + oracle));
  }
}

TEST(Kernels, Matern32ClosedForm) {
  const double d = 0.8, g = 0.5, r = std::sqrt(3.0) * d / g;
  EXPECT_NEAR(corr_1d(KernelFamily::kMatern32, 0.0, d, g), (1.0 + r) * std::exp(-r), 1e-15);
}

TEST(Kernels, InvalidArgumentsRejected) {
  EXPECT_THROW(corr_1d(KernelFamily::kMatern52, 0.0, -1.0, 1.0), Error);
  EXPECT_THROW(corr_1d(KernelFamily::kMatern52, 0.0, 1.0, 0.0), Error);
  EXPECT_THROW(corr_1d(KernelFamily::kMatern52, 0.0, std::nan(""), 1.0), Error);
  EXPECT_THROW(corr_1d(KernelFamily::kPowerExponential, 2.5, 1.0, 1.0), Error);
}

TEST(Kernels, RangeAndStrictMonotonicity) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.0, 3.0);
  for (int i = 0; i < 300; ++i) {
    const KernelFamily f = family_for(i);
    const double alpha = 0.3 + 1.7 * unif(rng) / 3.0;
    const double g = 0.1 + unif(rng);
    double d1 = unif(rng), d2 = unif(rng);
    if (d1 > d2) std::swap(d1, d2);
    if (d2 - d1 < 1e-6) continue;
    const double c1 = corr_1d(f, alpha, d1, g), c2 = corr_1d(f, alpha, d2, g);
    EXPECT_GT(c1, c2);
    EXPECT_GT(c2, 0.0);
    EXPECT_LE(c1, 1.0);
    if (d1 > 0.0) EXPECT_LT(c1, 1.0);
  }
  EXPECT_LT(corr_1d(KernelFamily::kMatern52, 0.0, 1e3, 1.0), 1e-100);
}

TEST(Kernels, ProductOfPowerExponentialFactors) {
  Eigen::MatrixXd a(1, 2), b(1, 2);
  a << 0, 0;
  b << 1, 1;
  const Eigen::Vector2d beta(1, 1);
  const Eigen::MatrixXd r = corr_matrix(a, b, KernelSpec::uniform(2, KernelFamily::kPowerExponential, 2.0), beta);
  EXPECT_NEAR(r(0, 0), std::exp(-2.0), 1e-15);
}

TEST(Kernels, MatrixMatchesEntrywiseProducts) {
  const Eigen::MatrixXd x = rgasp::testing::random_design(3, 2, 5);
  const Eigen::Vector2d beta(2, 3);
  const KernelSpec spec = KernelSpec::uniform(2);
  const Eigen::MatrixXd r = corr_matrix(x, x, spec, beta);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(r(i, i), 1.0);
    for (int j = 0; j < 3; ++j) {
      double prod = 1.0;
      for (int l = 0; l < 2; ++l) prod *= corr_1d(KernelFamily::kMatern52, 0.0, std::abs(x(i, l) - x(j, l)), 1.0 / beta[l]);
      EXPECT_NEAR(r(i, j), prod, 1e-14);
      EXPECT_EQ(r(i, j), r(j, i));
    }
  }
}

TEST(Kernels, DimensionMismatchRejected) {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2), b = Eigen::MatrixXd::Zero(2, 3);
  EXPECT_THROW(corr_matrix(a, b, KernelSpec::uniform(2), Eigen::Vector2d(1, 1)), Error);
  EXPECT_THROW(corr_matrix(a, a, KernelSpec::uniform(3), Eigen::Vector3d(1, 1, 1)), Error);
}

TEST(Kernels, SelfCorrelationIsPositiveSemidefinite) {
  for (int t = 0; t < 30; ++t) {
    const int n = 2 + t % 19, p = 1 + t % 4;
    const Eigen::MatrixXd x = rgasp::testing::random_design(n, p, 100 + t);
    const Eigen::VectorXd beta = rgasp::testing::random_vector(p, 200 + t, 0.2, 5.0);
    const KernelSpec spec = KernelSpec::uniform(p, family_for(t), 0.5 + 1.5 * (t % 4) / 3.0);
    const Eigen::MatrixXd r = corr_matrix(x, x, spec, beta);
    EXPECT_TRUE(r.isApprox(r.transpose(), 0.0));
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(r).eigenvalues().minCoeff(), -1e-8);
  }
}

TEST(Kernels, LogSpaceProductSurvivesManyDimensions) {
  const int p = 400;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(1, p), b = Eigen::MatrixXd::Constant(1, p, 1.0);
  const Eigen::MatrixXd r = corr_matrix(a, b, KernelSpec::uniform(p), Eigen::VectorXd::Constant(p, 0.05));
  const double one = corr_1d(KernelFamily::kMatern52, 0.0, 1.0, 20.0);
  EXPECT_NEAR(std::log(r(0, 0)), p * std::log(one), 1e-9);
}

TEST(Kernels, DerivativeZeroOnDiagonal) {
  const Eigen::MatrixXd x = rgasp::testing::random_design(5, 2, 9);
  for (int f = 0; f < 3; ++f) {
    const KernelSpec spec = KernelSpec::uniform(2, family_for(f), 0.5);
    const Eigen::MatrixXd dr = corr_matrix_deriv(distances(x, x), spec, Eigen::Vector2d(1.5, 0.7), 0);
    EXPECT_TRUE(dr.diagonal().isZero(0.0));
    EXPECT_TRUE(dr.allFinite());
    EXPECT_TRUE(dr.isApprox(dr.transpose(), 0.0));
  }
}

TEST(Kernels, DerivativeIndexChecked) {
  const Eigen::MatrixXd x = rgasp::testing::random_design(3, 2, 9);
  EXPECT_THROW(corr_matrix_deriv(distances(x, x), KernelSpec::uniform(2), Eigen::Vector2d(1, 1), 2), Error);
  EXPECT_THROW(corr_matrix_deriv(distances(x, x), KernelSpec::uniform(2), Eigen::Vector2d(1, 1), -1), Error);
}

TEST(Kernels, Matern52DerivativeMatchesFiniteDifference) {
  const double d = 0.5, beta = 2.0, h = 1e-6;
  const auto c = [&](double b) { return corr_1d(KernelFamily::kMatern52, 0.0, d, 1.0 / b); };
  const double fd = (c(beta + h) - c(beta - h)) / (2 * h);
  Eigen::MatrixXd a(1, 1), b(1, 1);
  a << 0.0;
  b << d;
  const Eigen::MatrixXd dr = corr_matrix_deriv(distances(a, b), KernelSpec::uniform(1), Eigen::VectorXd::Constant(1, beta), 0);
  EXPECT_LT(std::abs(dr(0, 0) - fd) / std::abs(fd), 1e-6);
}

TEST(Kernels, GaussianDerivativeClosedForm) {
  const double d = 0.9, beta = 1.3;
  Eigen::MatrixXd a(1, 1), b(1, 1);
  a << 0.0;
  b << d;
  const Eigen::MatrixXd dr = corr_matrix_deriv(distances(a, b), KernelSpec::uniform(1, KernelFamily::kPowerExponential, 2.0),
                                               Eigen::VectorXd::Constant(1, beta), 0);
  EXPECT_NEAR(dr(0, 0), -2.0 * d * d * beta * std::exp(-(d * beta) * (d * beta)), 1e-15);
}

TEST(Kernels, AllDerivativesMatchFiniteDifferences) {
  for (int t = 0; t < 30; ++t) {
    const int p = 1 + t % 3;
    const Eigen::MatrixXd x = rgasp::testing::random_design(6, p, 300 + t);
    const Eigen::VectorXd beta = rgasp::testing::random_vector(p, 400 + t, 0.3, 4.0);
    const KernelSpec spec = KernelSpec::uniform(p, family_for(t), 0.4 + 1.6 * (t % 5) / 4.0);
    const auto dist = distances(x, x);
    for (int l = 0; l < p; ++l) {
      const double h = 1e-6 * beta[l];
      Eigen::VectorXd bp = beta, bm = beta;
      bp[l] += h;
      bm[l] -= h;
      const Eigen::MatrixXd fd = (corr_matrix(dist, spec, bp) - corr_matrix(dist, spec, bm)) / (2 * h);
      const Eigen::MatrixXd an = corr_matrix_deriv(dist, spec, beta, l);
      EXPECT_LT((an - fd).norm() / std::max(fd.norm(), 1e-12), 1e-5) << "instance " << t << " dim " << l;
    }
  }
}
