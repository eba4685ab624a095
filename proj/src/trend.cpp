#include "robustgasp/trend.hpp"

#include "robustgasp/errors.hpp"

namespace rgasp {

const char* to_string(TrendKind kind) {
  switch (kind) {
    case TrendKind::kZero: return "zero";
    case TrendKind::kConstant: return "constant";
    case TrendKind::kLinear: return "linear";
    case TrendKind::kExplicit: return "explicit";
  }
  return "unknown";
}

Eigen::Index TrendBasis::num_basis(Eigen::Index p) const {
  switch (kind) {
    case TrendKind::kZero: return 0;
    case TrendKind::kConstant: return 1;
    case TrendKind::kLinear: return p + 1;
    case TrendKind::kExplicit: return matrix.cols();
  }
  return 0;
}

void check_degrees_of_freedom(Eigen::Index n, Eigen::Index q) {
  if (q >= n) {
    fail(ErrorCode::kDegreesOfFreedom, "trend has " + std::to_string(q) + " basis functions but only " +
                                           std::to_string(n) + " observations; need q < n");
  }
}

namespace {

Eigen::MatrixXd structural_basis(TrendKind kind, const Eigen::MatrixXd& points) {
  const Eigen::Index m = points.rows();
  switch (kind) {
    case TrendKind::kZero: return Eigen::MatrixXd(m, 0);
    case TrendKind::kConstant: return Eigen::MatrixXd::Ones(m, 1);
    case TrendKind::kLinear: {
      Eigen::MatrixXd h(m, points.cols() + 1);
      h.col(0).setOnes();
      h.rightCols(points.cols()) = points;
      return h;
    }
    case TrendKind::kExplicit: break;
  }
  return {};
}

}  // namespace

Eigen::MatrixXd eval_basis(const TrendBasis& trend, const Eigen::MatrixXd& points) {
  if (trend.kind == TrendKind::kExplicit) {
    require(trend.matrix.rows() == points.rows(),
            "explicit trend matrix has " + std::to_string(trend.matrix.rows()) + " rows, design has " +
                std::to_string(points.rows()));
    require(trend.matrix.allFinite(), "explicit trend matrix contains non-finite values");
    return trend.matrix;
  }
  return structural_basis(trend.kind, points);
}

Eigen::MatrixXd eval_basis(const TrendBasis& trend, const Eigen::MatrixXd& points,
                           const std::optional<Eigen::MatrixXd>& testing_trend) {
  if (trend.kind != TrendKind::kExplicit) return structural_basis(trend.kind, points);
  if (!testing_trend) {
    fail(ErrorCode::kMissingTrend, "model uses an explicit trend matrix; a testing trend with " +
                                       std::to_string(trend.matrix.cols()) + " columns is required");
  }
  require(testing_trend->rows() == points.rows() && testing_trend->cols() == trend.matrix.cols(),
          "testing trend must be " + std::to_string(points.rows()) + " x " + std::to_string(trend.matrix.cols()));
  return *testing_trend;
}

}  // namespace rgasp
