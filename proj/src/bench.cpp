#include "robustgasp/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "robustgasp/errors.hpp"
#include "robustgasp/inert.hpp"
#include "robustgasp/io.hpp"
#include "robustgasp/ppgasp.hpp"
#include "robustgasp/prediction.hpp"
#include "robustgasp/testbed.hpp"

namespace rgasp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Eigen::MatrixXd uniform_points(int n, int p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd x(n, p);
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < p; ++l) x(i, l) = unif(rng);
  }
  return x;
}

BenchRow scored_row(const GaSPModel& model, const Eigen::MatrixXd& x_test, const Eigen::VectorXd& y_test,
                    std::string method, std::string config, std::int64_t seed, double seconds) {
  const PredictionMetrics m = metrics(predict(model, x_test), y_test);
  return {std::move(method), std::move(config), seed, m.rmse, m.p_ci95, m.l_ci95, seconds, ""};
}

void bench_sinewave(BenchReport& report) {
  const Eigen::MatrixXd x = equispaced(12, 0.0, 1.0);
  const Eigen::VectorXd y = evaluate(TestFunction::kSineWave, x);
  const Eigen::MatrixXd x_test = equispaced(100, 0.0, 1.0);
  const Eigen::VectorXd y_test = evaluate(TestFunction::kSineWave, x_test);
  const KernelSpec spec = KernelSpec::uniform(1);

  auto t0 = Clock::now();
  const GaSPModel jr = fit(x, y, TrendBasis::constant(), spec);
  report.rows.push_back(scored_row(jr, x_test, y_test, "jr", "constant", 0, seconds_since(t0)));
  report.rows.back().note = "gamma=" + format_double(jr.gamma_hat()[0]);

  FitOptions flat;
  flat.lower_bound = false;
  t0 = Clock::now();
  const GaSPModel mle = fit_flat_mode(x, y, TrendBasis::constant(), spec, flat);
  report.rows.push_back(scored_row(mle, x_test, y_test, "flat", "constant", 0, seconds_since(t0)));
  report.rows.back().note = "gamma=" + format_double(mle.gamma_hat()[0]);
}

void bench_friedman(BenchReport& report, int threads) {
  for (std::int64_t seed : report.seeds) {
    const Eigen::MatrixXd x = maximin_lhs(40, 5, static_cast<std::uint64_t>(seed)).points;
    const Eigen::VectorXd y = evaluate(TestFunction::kFriedman5, x);
    const Eigen::MatrixXd x_test = uniform_points(200, 5, static_cast<std::uint64_t>(seed) + 1000003);
    const Eigen::VectorXd y_test = evaluate(TestFunction::kFriedman5, x_test);
    FitOptions options;
    options.threads = threads;
    for (const auto& [name, trend] :
         {std::pair{"constant", TrendBasis::constant()}, std::pair{"linear", TrendBasis::linear()}}) {
      const auto t0 = Clock::now();
      const GaSPModel model = fit(x, y, trend, KernelSpec::uniform(5), options);
      report.rows.push_back(scored_row(model, x_test, y_test, "jr", name, seed, seconds_since(t0)));
    }
  }
}

void bench_borehole(BenchReport& report, int threads) {
  for (std::int64_t seed : report.seeds) {
    const Eigen::MatrixXd unit = maximin_lhs(40, 8, static_cast<std::uint64_t>(seed)).points;
    const Eigen::MatrixXd x = rescale(unit, borehole_lower(), borehole_upper());
    const Eigen::VectorXd y = evaluate(TestFunction::kBorehole, x);
    const Eigen::MatrixXd x_test =
        rescale(uniform_points(200, 8, static_cast<std::uint64_t>(seed) + 1000003), borehole_lower(), borehole_upper());
    const Eigen::VectorXd y_test = evaluate(TestFunction::kBorehole, x_test);
    FitOptions options;
    options.lower_bound = false;
    options.threads = threads;
    const auto t0 = Clock::now();
    const GaSPModel model = fit(x, y, TrendBasis::constant(), KernelSpec::uniform(8), options);
    BenchRow row = scored_row(model, x_test, y_test, "jr", "constant", seed, seconds_since(t0));
    const InertReport inert = find_inert_inputs(model);
    row.note = "inert=";
    for (std::size_t i = 0; i < inert.flagged.size(); ++i) {
      if (i > 0) row.note += ' ';
      row.note += std::to_string(inert.flagged[i]);
    }
    report.rows.push_back(std::move(row));
  }
}

void bench_ppgasp(BenchReport& report, int threads) {
  const int n = 50, n_test = 20;
  const KernelSpec spec = KernelSpec::uniform(2);
  Eigen::VectorXd beta(2);
  beta << 3.0, 5.0;
  for (std::int64_t seed : report.seeds) {
    const Eigen::MatrixXd x = maximin_lhs(n, 2, static_cast<std::uint64_t>(seed)).points;
    const Eigen::MatrixXd x_test = uniform_points(n_test, 2, static_cast<std::uint64_t>(seed) + 1000003);
    Eigen::MatrixXd all(n + n_test, 2);
    all << x, x_test;
    for (int k : {500, 1000, 2000}) {
      const Eigen::MatrixXd y_all = sample_gp(all, spec, beta, 0.0, k, static_cast<std::uint64_t>(seed));
      FitOptions options;
      options.threads = threads;
      const auto t0 = Clock::now();
      const PPGaSPModel model = fit_ppgasp(x, y_all.topRows(n), TrendBasis::constant(), spec, options);
      const PPPredictiveSummary pred = predict_ppgasp(model, x_test);
      const double secs = seconds_since(t0);
      const PredictionMetrics m = metrics(pred.mean, pred.lower95, pred.upper95, y_all.bottomRows(n_test));
      report.rows.push_back({"ppgasp", "k=" + std::to_string(k), seed, m.rmse, m.p_ci95, m.l_ci95, secs, ""});
    }
  }
}

std::string csv_field(const std::string& s) {
  require(s.find_first_of(",\n") == std::string::npos, "bench field contains a separator: " + s);
  return s;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

const std::vector<std::string>& bench_experiments() {
  static const std::vector<std::string> names = {"sinewave", "friedman", "borehole-inert", "ppgasp-scaling"};
  return names;
}

BenchReport run_bench(const std::string& experiment, const std::vector<std::int64_t>& seeds, int threads) {
  BenchReport report;
  report.experiment = experiment;
  report.seeds = seeds;
  if (experiment == "sinewave") {
    report.seeds = {0};
    bench_sinewave(report);
  } else if (experiment == "friedman") {
    bench_friedman(report, threads);
  } else if (experiment == "borehole-inert") {
    bench_borehole(report, threads);
  } else if (experiment == "ppgasp-scaling") {
    bench_ppgasp(report, threads);
  } else {
    fail(ErrorCode::kInvalidArgument,
         "unknown experiment '" + experiment + "' (expected sinewave|friedman|borehole-inert|ppgasp-scaling)");
  }
  return report;
}

std::string bench_to_csv(const BenchReport& report) {
  std::string out = "experiment,method,config,seed,rmse,p_ci95,l_ci95,wall_seconds,note\n";
  for (const auto& r : report.rows) {
    out += csv_field(report.experiment) + ',' + csv_field(r.method) + ',' + csv_field(r.config) + ',' +
           std::to_string(r.seed) + ',' + format_double(r.rmse) + ',' + format_double(r.p_ci95) + ',' +
           format_double(r.l_ci95) + ',' + format_double(r.wall_seconds) + ',' + csv_field(r.note) + '\n';
  }
  return out;
}

BenchReport bench_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  BenchReport report;
  if (!std::getline(is, line) || line.rfind("experiment,", 0) != 0) fail(ErrorCode::kParse, "bench CSV: bad header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) f.push_back(field);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 9) fail(ErrorCode::kParse, "bench CSV: expected 9 fields in '" + line + "'");
    BenchRow r;
    report.experiment = f[0];
    r.method = f[1];
    r.config = f[2];
    double seed = 0.0;
    if (!parse_double(f[3], seed) || !parse_double(f[4], r.rmse) || !parse_double(f[5], r.p_ci95) ||
        !parse_double(f[6], r.l_ci95) || !parse_double(f[7], r.wall_seconds)) {
      fail(ErrorCode::kParse, "bench CSV: non-numeric metric in '" + line + "'");
    }
    r.seed = static_cast<std::int64_t>(seed);
    r.note = f[8];
    if (std::find(report.seeds.begin(), report.seeds.end(), r.seed) == report.seeds.end()) {
      report.seeds.push_back(r.seed);
    }
    report.rows.push_back(std::move(r));
  }
  return report;
}

std::string bench_table(const BenchReport& report) {
  std::map<std::pair<std::string, std::string>, std::vector<const BenchRow*>> groups;
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& r : report.rows) {
    auto key = std::pair{r.method, r.config};
    if (groups.find(key) == groups.end()) order.push_back(key);
    groups[key].push_back(&r);
  }
  std::ostringstream os;
  os << "experiment: " << report.experiment << " (" << report.seeds.size() << " seed"
     << (report.seeds.size() == 1 ? "" : "s") << ", medians)\n";
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-8s %-12s %12s %10s %10s %10s\n", "method", "config", "RMSE", "P_CI(95%)",
                "L_CI(95%)", "seconds");
  os << buf;
  for (const auto& key : order) {
    std::vector<double> rmse, p, l, t;
    for (const BenchRow* r : groups[key]) {
      rmse.push_back(r->rmse);
      p.push_back(r->p_ci95);
      l.push_back(r->l_ci95);
      t.push_back(r->wall_seconds);
    }
    std::snprintf(buf, sizeof(buf), "%-8s %-12s %12.6g %10.4f %10.4g %10.3f\n", key.first.c_str(),
                  key.second.c_str(), median(rmse), median(p), median(l), median(t));
    os << buf;
  }
  bool any_note = false;
  for (const auto& r : report.rows) any_note = any_note || !r.note.empty();
  if (any_note) {
    for (const auto& r : report.rows) {
      if (!r.note.empty()) os << "  " << r.method << " " << r.config << " seed " << r.seed << ": " << r.note << "\n";
    }
  }
  return os.str();
}

}  // namespace rgasp
