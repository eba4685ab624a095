#include "robustgasp/testbed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include "robustgasp/errors.hpp"

namespace rgasp {

namespace {

Eigen::MatrixXd draw_lhs(int n, int p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd x(n, p);
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int l = 0; l < p; ++l) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int i = 0; i < n; ++i) {
      const double v = (perm[static_cast<std::size_t>(i)] + unif(rng)) / n;
      x(i, l) = std::min(v, std::nextafter((perm[static_cast<std::size_t>(i)] + 1.0) / n, 0.0));
    }
  }
  return x;
}

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::infinity());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = (x.row(i) - x.row(j)).squaredNorm();
  }
  return d;
}

// Smallest squared distance from point i to every other point, with point
// i's coordinate l replaced by v and point k's by the old value.
double swapped_row_min(const Eigen::MatrixXd& x, Eigen::Index i, Eigen::Index k, Eigen::Index l) {
  Eigen::RowVectorXd xi = x.row(i), xk = x.row(k);
  std::swap(xi[l], xk[l]);
  double best = (xi - xk).squaredNorm();
  for (Eigen::Index j = 0; j < x.rows(); ++j) {
    if (j == i || j == k) continue;
    best = std::min({best, (xi - x.row(j)).squaredNorm(), (xk - x.row(j)).squaredNorm()});
  }
  return best;
}

void coordinate_exchange(Eigen::MatrixXd& x, int passes) {
  const Eigen::Index n = x.rows(), p = x.cols();
  for (int pass = 0; pass < passes; ++pass) {
    const Eigen::MatrixXd d = squared_distances(x);
    Eigen::Index ci = 0, cj = 0;
    const double d_min = d.minCoeff(&ci, &cj);
    double best = d_min;
    Eigen::Index bi = -1, bk = -1, bl = -1;
    for (Eigen::Index i : {ci, cj}) {
      for (Eigen::Index l = 0; l < p; ++l) {
        for (Eigen::Index k = 0; k < n; ++k) {
          if (k == i) continue;
          const double v = swapped_row_min(x, i, k, l);
          if (v > best) {
            best = v;
            bi = i;
            bk = k;
            bl = l;
          }
        }
      }
    }
    if (bi < 0) return;
    std::swap(x(bi, bl), x(bk, bl));
  }
}

}  // namespace

double min_pairwise_distance(const Eigen::MatrixXd& points) {
  if (points.rows() < 2) return std::numeric_limits<double>::infinity();
  return std::sqrt(squared_distances(points).minCoeff());
}

bool has_latin_property(const Eigen::MatrixXd& points) {
  const Eigen::Index n = points.rows();
  for (Eigen::Index l = 0; l < points.cols(); ++l) {
    std::vector<int> seen(static_cast<std::size_t>(n), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = points(i, l);
      if (!(v >= 0.0 && v < 1.0)) return false;
      const auto s = static_cast<std::size_t>(std::floor(v * static_cast<double>(n)));
      if (s >= seen.size() || seen[s]++ > 0) return false;
    }
  }
  return true;
}

LHDesign lhs(int n, int p, std::uint64_t seed) {
  require(n >= 2 && p >= 1, "Latin hypercube needs n >= 2 and p >= 1");
  std::mt19937_64 rng(seed);
  LHDesign out;
  out.points = draw_lhs(n, p, rng);
  out.seed = seed;
  out.min_distance = min_pairwise_distance(out.points);
  return out;
}

LHDesign maximin_lhs(int n, int p, std::uint64_t seed, int restarts) {
  require(n >= 2 && p >= 1, "Latin hypercube needs n >= 2 and p >= 1");
  require(restarts >= 1, "restarts must be at least 1");
  std::mt19937_64 rng(seed);
  LHDesign out;
  out.seed = seed;
  out.maximin = true;
  out.min_distance = -1.0;
  for (int r = 0; r < restarts; ++r) {
    Eigen::MatrixXd candidate = draw_lhs(n, p, rng);
    const double d = min_pairwise_distance(candidate);
    if (d > out.min_distance) {
      out.points = std::move(candidate);
      out.min_distance = d;
    }
  }
  coordinate_exchange(out.points, n * p);
  out.min_distance = min_pairwise_distance(out.points);
  return out;
}

Eigen::VectorXd equispaced(int n, double lo, double hi) {
  require(n >= 1, "need at least one point");
  if (n == 1) return Eigen::VectorXd::Constant(1, lo);
  return Eigen::VectorXd::LinSpaced(n, lo, hi);
}

Eigen::MatrixXd rescale(const Eigen::MatrixXd& unit, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  require(unit.cols() == lower.size() && unit.cols() == upper.size(), "rescale: bound length differs from p");
  Eigen::MatrixXd out = unit;
  for (Eigen::Index l = 0; l < unit.cols(); ++l) {
    out.col(l) = (lower[l] + (upper[l] - lower[l]) * unit.col(l).array()).matrix();
  }
  return out;
}

Eigen::VectorXd borehole_lower() {
  Eigen::VectorXd v(8);
  v << 0.05, 100, 63070, 990, 63.1, 700, 1120, 9855;
  return v;
}

Eigen::VectorXd borehole_upper() {
  Eigen::VectorXd v(8);
  v << 0.15, 50000, 115600, 1110, 116, 820, 1680, 12045;
  return v;
}

bool borehole_in_domain(const Eigen::VectorXd& x) {
  return x.size() == 8 && (x.array() >= borehole_lower().array()).all() &&
         (x.array() <= borehole_upper().array()).all();
}

double borehole(const Eigen::VectorXd& x) {
  require(x.size() == 8, "borehole takes 8 inputs");
  const double rw = x[0], r = x[1], tu = x[2], hu = x[3], tl = x[4], hl = x[5], len = x[6], kw = x[7];
  require(rw > 0.0 && r > rw, "borehole: need r > r_w > 0 for log(r / r_w) > 0");
  const double lr = std::log(r / rw);
  return 2.0 * std::numbers::pi * tu * (hu - hl) / (lr * (1.0 + 2.0 * len * tu / (lr * rw * rw * kw) + tu / tl));
}

double friedman5(const Eigen::VectorXd& x) {
  require(x.size() == 5, "friedman5 takes 5 inputs");
  return 10.0 * std::sin(std::numbers::pi * x[0] * x[1]) + 20.0 * (x[2] - 0.5) * (x[2] - 0.5) + 10.0 * x[3] +
         5.0 * x[4];
}

double higdon1(double x) {
  return std::sin(2.0 * std::numbers::pi * x / 10.0) + 0.2 * std::sin(2.0 * std::numbers::pi * x / 2.5);
}

double modified_sine_wave(double x) {
  return 3.0 * std::sin(5.0 * std::numbers::pi * x) * x + std::cos(7.0 * std::numbers::pi * x);
}

TestFunction parse_test_function(const std::string& name) {
  if (name == "borehole") return TestFunction::kBorehole;
  if (name == "friedman5" || name == "friedman") return TestFunction::kFriedman5;
  if (name == "higdon1") return TestFunction::kHigdon1;
  if (name == "sinewave") return TestFunction::kSineWave;
  fail(ErrorCode::kInvalidArgument, "unknown function '" + name + "' (expected borehole|friedman5|higdon1|sinewave)");
}

const char* to_string(TestFunction fn) {
  switch (fn) {
    case TestFunction::kBorehole: return "borehole";
    case TestFunction::kFriedman5: return "friedman5";
    case TestFunction::kHigdon1: return "higdon1";
    case TestFunction::kSineWave: return "sinewave";
  }
  return "unknown";
}

int input_dimension(TestFunction fn) {
  switch (fn) {
    case TestFunction::kBorehole: return 8;
    case TestFunction::kFriedman5: return 5;
    case TestFunction::kHigdon1:
    case TestFunction::kSineWave: return 1;
  }
  return 0;
}

Eigen::VectorXd domain_lower(TestFunction fn) {
  if (fn == TestFunction::kBorehole) return borehole_lower();
  return Eigen::VectorXd::Zero(input_dimension(fn));
}

Eigen::VectorXd domain_upper(TestFunction fn) {
  if (fn == TestFunction::kBorehole) return borehole_upper();
  if (fn == TestFunction::kHigdon1) return Eigen::VectorXd::Constant(1, 10.0);
  return Eigen::VectorXd::Ones(input_dimension(fn));
}

Eigen::VectorXd evaluate(TestFunction fn, const Eigen::MatrixXd& points) {
  require(points.cols() == input_dimension(fn), std::string(to_string(fn)) + " takes " +
                                                    std::to_string(input_dimension(fn)) + " inputs");
  Eigen::VectorXd y(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const Eigen::VectorXd x = points.row(i).transpose();
    switch (fn) {
      case TestFunction::kBorehole: y[i] = borehole(x); break;
      case TestFunction::kFriedman5: y[i] = friedman5(x); break;
      case TestFunction::kHigdon1: y[i] = higdon1(x[0]); break;
      case TestFunction::kSineWave: y[i] = modified_sine_wave(x[0]); break;
    }
  }
  return y;
}

Eigen::MatrixXd sample_gp(const Eigen::MatrixXd& points, const KernelSpec& spec, const Eigen::VectorXd& beta,
                          double eta, int num_outputs, std::uint64_t seed, double variance) {
  require(num_outputs >= 1, "need at least one output");
  require(eta >= 0.0 && variance > 0.0, "sample_gp: need eta >= 0 and variance > 0");
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd r = corr_matrix(points, points, spec, beta);
  r.diagonal().array() += eta;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(r);
  const Eigen::VectorXd d = ldlt.vectorD().cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXd factor = ldlt.matrixL();
  factor = factor * d.asDiagonal();
  factor = ldlt.transpositionsP().transpose() * factor;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd z(n, num_outputs);
  for (Eigen::Index j = 0; j < num_outputs; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) z(i, j) = normal(rng);
  }
  return std::sqrt(variance) * factor * z;
}

}  // namespace rgasp
