#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "robustgasp/kernels.hpp"

namespace rgasp {

struct LHDesign {
  Eigen::MatrixXd points;  // n x p in [0, 1]^p
  std::uint64_t seed = 0;
  bool maximin = false;
  double min_distance = 0.0;
};

/// Random permutation per dimension, jittered uniformly within strata.
LHDesign lhs(int n, int p, std::uint64_t seed);

/// Best of `restarts` Latin hypercubes by minimum pairwise distance, then a
/// coordinate-exchange search that never lowers it. The first candidate is
/// the lhs() design of the same seed.
LHDesign maximin_lhs(int n, int p, std::uint64_t seed, int restarts = 50);

double min_pairwise_distance(const Eigen::MatrixXd& points);

/// True when every dimension has exactly one point per stratum [(i-1)/n, i/n).
bool has_latin_property(const Eigen::MatrixXd& points);

Eigen::VectorXd equispaced(int n, double lo, double hi);

/// Maps [0, 1]^p columnwise onto [lower_l, upper_l].
Eigen::MatrixXd rescale(const Eigen::MatrixXd& unit, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

Eigen::VectorXd borehole_lower();
Eigen::VectorXd borehole_upper();
bool borehole_in_domain(const Eigen::VectorXd& x);

/// Flow rate through a borehole; x = (r_w, r, T_u, H_u, T_l, H_l, L, K_w).
double borehole(const Eigen::VectorXd& x);

double friedman5(const Eigen::VectorXd& x);

double higdon1(double x);

/// 3 sin(5 pi x) x + cos(7 pi x).
double modified_sine_wave(double x);

enum class TestFunction { kBorehole, kFriedman5, kHigdon1, kSineWave };

TestFunction parse_test_function(const std::string& name);
const char* to_string(TestFunction fn);
int input_dimension(TestFunction fn);

/// Lower and upper corners of the input domain of each test function.
Eigen::VectorXd domain_lower(TestFunction fn);
Eigen::VectorXd domain_upper(TestFunction fn);

/// Evaluates the function at every row of `points` (physical units).
Eigen::VectorXd evaluate(TestFunction fn, const Eigen::MatrixXd& points);

/// Draws `num_outputs` independent columns from a zero-mean GP with
/// covariance variance * (R + eta I) at `points`.
Eigen::MatrixXd sample_gp(const Eigen::MatrixXd& points, const KernelSpec& spec, const Eigen::VectorXd& beta,
                          double eta, int num_outputs, std::uint64_t seed, double variance = 1.0);

}  // namespace rgasp
