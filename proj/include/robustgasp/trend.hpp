#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

namespace rgasp {

enum class TrendKind { kZero, kConstant, kLinear, kExplicit };

const char* to_string(TrendKind kind);

/// Mean-function basis h(x). For kExplicit the fit-time basis values are
/// stored; prediction then needs a caller-supplied testing basis.
struct TrendBasis {
  TrendKind kind = TrendKind::kConstant;
  Eigen::MatrixXd matrix;  // only used by kExplicit

  static TrendBasis zero() { return {TrendKind::kZero, {}}; }
  static TrendBasis constant() { return {TrendKind::kConstant, {}}; }
  static TrendBasis linear() { return {TrendKind::kLinear, {}}; }
  static TrendBasis explicit_matrix(Eigen::MatrixXd h) { return {TrendKind::kExplicit, std::move(h)}; }

  /// Number of basis functions for inputs of dimension p.
  Eigen::Index num_basis(Eigen::Index p) const;
};

/// Basis matrix at the design (fit time).
Eigen::MatrixXd eval_basis(const TrendBasis& trend, const Eigen::MatrixXd& points);

/// Basis matrix at new inputs. Explicit trends need `testing_trend`.
Eigen::MatrixXd eval_basis(const TrendBasis& trend, const Eigen::MatrixXd& points,
                           const std::optional<Eigen::MatrixXd>& testing_trend);

/// Throws a degrees-of-freedom error unless q < n.
void check_degrees_of_freedom(Eigen::Index n, Eigen::Index q);

}  // namespace rgasp
