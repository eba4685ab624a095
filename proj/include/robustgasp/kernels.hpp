#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "robustgasp/errors.hpp"

namespace rgasp {

template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class KernelFamily { kMatern52, kMatern32, kPowerExponential };

inline constexpr double kDefaultRoughness = 1.9;

inline const char* to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::kMatern52: return "matern_5_2";
    case KernelFamily::kMatern32: return "matern_3_2";
    case KernelFamily::kPowerExponential: return "pow_exp";
  }
  return "unknown";
}

inline KernelFamily parse_kernel_family(const std::string& name) {
  if (name == "matern_5_2") return KernelFamily::kMatern52;
  if (name == "matern_3_2") return KernelFamily::kMatern32;
  if (name == "pow_exp") return KernelFamily::kPowerExponential;
  fail(ErrorCode::kInvalidArgument, "unknown kernel '" + name + "' (expected matern_5_2, matern_3_2 or pow_exp)");
}

/// Per-dimension correlation family and roughness. The roughness only
/// matters for power-exponential dimensions.
struct KernelSpec {
  std::vector<KernelFamily> families;
  std::vector<double> alpha;

  static KernelSpec uniform(Eigen::Index p, KernelFamily family = KernelFamily::kMatern52,
                            double roughness = kDefaultRoughness) {
    KernelSpec spec;
    spec.families.assign(static_cast<std::size_t>(p), family);
    spec.alpha.assign(static_cast<std::size_t>(p), roughness);
    return spec;
  }

  Eigen::Index dims() const { return static_cast<Eigen::Index>(families.size()); }

  void validate() const {
    require(!families.empty(), "kernel spec needs at least one dimension");
    require(alpha.size() == families.size(), "kernel spec: alpha must have one entry per dimension");
    for (std::size_t l = 0; l < families.size(); ++l) {
      if (families[l] == KernelFamily::kPowerExponential) {
        require(alpha[l] > 0.0 && alpha[l] <= 2.0,
                "power exponential roughness must lie in (0, 2], got " + std::to_string(alpha[l]) +
                    " in dimension " + std::to_string(l + 1));
      }
    }
  }
};

/// log c(d) for one dimension, written in terms of the inverse range beta.
template <typename Scalar>
Scalar log_corr_1d(KernelFamily family, double alpha, Scalar d, Scalar beta) {
  using std::log1p;
  using std::pow;
  using std::sqrt;
  switch (family) {
    case KernelFamily::kMatern52: {
      const Scalar r = Scalar(sqrt(5.0)) * d * beta;
      if (r > Scalar(1e100)) return -r;
      return log1p(r + r * r / Scalar(3)) - r;
    }
    case KernelFamily::kMatern32: {
      const Scalar r = Scalar(sqrt(3.0)) * d * beta;
      return log1p(r) - r;
    }
    case KernelFamily::kPowerExponential:
      return -pow(d * beta, Scalar(alpha));
  }
  return Scalar(0);
}

/// d/dbeta of log c(d). Zero at d = 0 for every family, including the
/// power exponential with alpha < 1 where the limit is singular.
template <typename Scalar>
Scalar dlog_corr_1d_dbeta(KernelFamily family, double alpha, Scalar d, Scalar beta) {
  using std::pow;
  using std::sqrt;
  if (d == Scalar(0)) return Scalar(0);
  switch (family) {
    case KernelFamily::kMatern52: {
      const Scalar s5 = Scalar(sqrt(5.0));
      const Scalar r = s5 * d * beta;
      return -(Scalar(1) + r) / (Scalar(3) / r + Scalar(3) + r) * s5 * d;
    }
    case KernelFamily::kMatern32: {
      const Scalar s3 = Scalar(sqrt(3.0));
      const Scalar r = s3 * d * beta;
      return -r / (Scalar(1) + r) * s3 * d;
    }
    case KernelFamily::kPowerExponential:
      return -Scalar(alpha) * pow(d, Scalar(alpha)) * pow(beta, Scalar(alpha) - Scalar(1));
  }
  return Scalar(0);
}

/// One-dimensional correlation at distance d for range parameter gamma.
template <typename Scalar>
Scalar corr_1d(KernelFamily family, double alpha, Scalar d, Scalar gamma) {
  using std::isfinite;
  require(isfinite(d) && d >= Scalar(0), "corr_1d: distance must be finite and non-negative");
  require(isfinite(gamma) && gamma > Scalar(0), "corr_1d: range parameter must be positive");
  if (family == KernelFamily::kPowerExponential) {
    require(alpha > 0.0 && alpha <= 2.0, "corr_1d: power exponential roughness must lie in (0, 2]");
  }
  using std::exp;
  return exp(log_corr_1d<Scalar>(family, alpha, d, Scalar(1) / gamma));
}

/// Per-dimension absolute coordinate differences between two point sets.
template <typename Scalar>
using DistanceTensor = std::vector<MatX<Scalar>>;

template <typename DerivedA, typename DerivedB>
DistanceTensor<typename DerivedA::Scalar> distances(const Eigen::MatrixBase<DerivedA>& a,
                                                    const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  require(a.cols() == b.cols(), "distances: point sets have different dimensions (" +
                                    std::to_string(a.cols()) + " vs " + std::to_string(b.cols()) + ")");
  DistanceTensor<Scalar> out(static_cast<std::size_t>(a.cols()));
  for (Eigen::Index l = 0; l < a.cols(); ++l) {
    out[static_cast<std::size_t>(l)] =
        (a.col(l).replicate(1, b.rows()) - b.col(l).transpose().replicate(a.rows(), 1)).cwiseAbs();
  }
  return out;
}

namespace detail {

template <typename Scalar, typename DerivedBeta>
void check_kernel_args(const DistanceTensor<Scalar>& dist, const KernelSpec& spec,
                       const Eigen::MatrixBase<DerivedBeta>& beta) {
  require(!dist.empty(), "correlation: empty distance tensor");
  require(static_cast<Eigen::Index>(dist.size()) == spec.dims(),
          "correlation: kernel has " + std::to_string(spec.dims()) + " dimensions but inputs have " +
              std::to_string(dist.size()));
  require(beta.size() == spec.dims(), "correlation: inverse range vector has " + std::to_string(beta.size()) +
                                          " entries, expected " + std::to_string(spec.dims()));
  for (Eigen::Index l = 0; l < beta.size(); ++l) {
    require(std::isfinite(beta[l]) && beta[l] > 0, "correlation: inverse range parameters must be positive");
  }
}

}  // namespace detail

/// Product correlation matrix. The product is accumulated in log space so
/// that many weakly correlated dimensions do not underflow early.
template <typename Scalar, typename DerivedBeta>
MatX<Scalar> corr_matrix(const DistanceTensor<Scalar>& dist, const KernelSpec& spec,
                         const Eigen::MatrixBase<DerivedBeta>& beta) {
  detail::check_kernel_args(dist, spec, beta);
  const auto& d0 = dist.front();
  MatX<Scalar> log_r = MatX<Scalar>::Zero(d0.rows(), d0.cols());
  for (std::size_t l = 0; l < dist.size(); ++l) {
    const KernelFamily family = spec.families[l];
    const double alpha = spec.alpha[l];
    const Scalar b = beta[static_cast<Eigen::Index>(l)];
    log_r += dist[l].unaryExpr([&](Scalar d) { return log_corr_1d<Scalar>(family, alpha, d, b); });
  }
  return log_r.array().exp().matrix();
}

template <typename DerivedA, typename DerivedB, typename DerivedBeta>
MatX<typename DerivedA::Scalar> corr_matrix(const Eigen::MatrixBase<DerivedA>& a,
                                            const Eigen::MatrixBase<DerivedB>& b, const KernelSpec& spec,
                                            const Eigen::MatrixBase<DerivedBeta>& beta) {
  return corr_matrix(distances(a, b), spec, beta);
}

/// dR/dbeta_l given an already evaluated correlation matrix R.
template <typename Scalar, typename DerivedBeta>
MatX<Scalar> corr_matrix_deriv(const DistanceTensor<Scalar>& dist, const KernelSpec& spec,
                               const Eigen::MatrixBase<DerivedBeta>& beta, Eigen::Index l,
                               const MatX<Scalar>& corr) {
  detail::check_kernel_args(dist, spec, beta);
  require(l >= 0 && l < spec.dims(), "corr_matrix_deriv: dimension index " + std::to_string(l) +
                                         " out of range [0, " + std::to_string(spec.dims()) + ")");
  const auto ul = static_cast<std::size_t>(l);
  const KernelFamily family = spec.families[ul];
  const double alpha = spec.alpha[ul];
  const Scalar b = beta[l];
  return corr.cwiseProduct(
      dist[ul].unaryExpr([&](Scalar d) { return dlog_corr_1d_dbeta<Scalar>(family, alpha, d, b); }));
}

template <typename Scalar, typename DerivedBeta>
MatX<Scalar> corr_matrix_deriv(const DistanceTensor<Scalar>& dist, const KernelSpec& spec,
                               const Eigen::MatrixBase<DerivedBeta>& beta, Eigen::Index l) {
  return corr_matrix_deriv(dist, spec, beta, l, corr_matrix(dist, spec, beta));
}

}  // namespace rgasp
