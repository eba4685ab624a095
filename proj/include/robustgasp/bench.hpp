#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rgasp {

struct BenchRow {
  std::string method;  // estimator, e.g. "jr" or "flat"
  std::string config;  // trend or problem size
  std::int64_t seed = 0;
  double rmse = 0.0;
  double p_ci95 = 0.0;
  double l_ci95 = 0.0;
  double wall_seconds = 0.0;
  std::string note;  // experiment-specific detail, e.g. flagged inputs
};

struct BenchReport {
  std::string experiment;
  std::vector<std::int64_t> seeds;
  std::vector<BenchRow> rows;
};

const std::vector<std::string>& bench_experiments();

/// Runs one of: sinewave, friedman, borehole-inert, ppgasp-scaling.
BenchReport run_bench(const std::string& experiment, const std::vector<std::int64_t>& seeds, int threads = 1);

std::string bench_to_csv(const BenchReport& report);
BenchReport bench_from_csv(const std::string& text);

/// Human-readable table with per-(method, config) medians.
std::string bench_table(const BenchReport& report);

}  // namespace rgasp
