#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "robustgasp/fitting.hpp"

namespace rgasp {

struct InertReport {
  Eigen::VectorXd P;          // normalized inverse range parameters, sum = p
  Eigen::VectorXd C;          // scale constants used for the normalization
  Eigen::VectorXd beta;
  std::vector<int> flagged;   // 1-based dimension indices with P_l < threshold
  double threshold = 0.1;
  std::string warning;        // non-empty when the prior is not the JR prior
};

/// P_l = p C_l beta_l / sum_i C_i beta_i from the fitted mode; no refit.
InertReport find_inert_inputs(const Emulator& model, double threshold = 0.1);

}  // namespace rgasp
