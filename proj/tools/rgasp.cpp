#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Dense>

#include "robustgasp/bench.hpp"
#include "robustgasp/errors.hpp"
#include "robustgasp/inert.hpp"
#include "robustgasp/io.hpp"
#include "robustgasp/ppgasp.hpp"
#include "robustgasp/prediction.hpp"
#include "robustgasp/testbed.hpp"

using namespace rgasp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitContract = 3;
constexpr int kExitNumerical = 4;

struct Globals {
  int threads = 0;
  bool quiet = false;
};

struct FitArgs {
  std::string design, response, out;
  std::string kernel = "matern_5_2";
  std::string alpha;
  std::string trend = "constant";
  std::string prior = "jr";
  std::string prior_scale = "range";
  bool nugget_est = false;
  std::optional<double> nugget;
  bool lower_bound = true;
  bool multiple_starts = false;
  int max_eval = 30;
  double xtol_rel = 1e-5;
};

struct PredictArgs {
  std::string model, input, trend_file, out;
  std::string sd_kind = "t";
};

struct SimulateArgs {
  std::string model, input, trend_file, out;
  int num_sample = 1;
  std::uint64_t seed = 1;
};

struct GenArgs {
  std::string fn, out_design, out_response;
  int n = 0;
  std::uint64_t seed = 1;
  bool maximin = false;
  bool equispaced = false;
};

struct BenchArgs {
  std::string experiment, out;
  std::string seeds = "1,2,3,4,5";
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, ',')) out.push_back(item);
  return out;
}

double parse_number(const std::string& text, const std::string& what) {
  double v = 0.0;
  if (!parse_double(text, v)) fail(ErrorCode::kInvalidArgument, what + ": '" + text + "' is not a number");
  return v;
}

std::vector<std::string> column_names(const std::string& stem, Eigen::Index count) {
  std::vector<std::string> names;
  for (Eigen::Index i = 1; i <= count; ++i) names.push_back(stem + std::to_string(i));
  return names;
}

KernelSpec build_kernel(const FitArgs& a, Eigen::Index p) {
  const auto families = split_list(a.kernel);
  KernelSpec spec;
  if (families.size() == 1) {
    spec = KernelSpec::uniform(p, parse_kernel_family(families[0]));
  } else {
    require(static_cast<Eigen::Index>(families.size()) == p,
            "--kernel lists " + std::to_string(families.size()) + " families, expected 1 or p = " + std::to_string(p));
    for (const auto& f : families) spec.families.push_back(parse_kernel_family(f));
    spec.alpha.assign(static_cast<std::size_t>(p), kDefaultRoughness);
  }
  if (!a.alpha.empty()) {
    const auto parts = split_list(a.alpha);
    if (parts.size() == 1) {
      spec.alpha.assign(static_cast<std::size_t>(p), parse_number(parts[0], "--alpha"));
    } else {
      require(static_cast<Eigen::Index>(parts.size()) == p,
              "--alpha lists " + std::to_string(parts.size()) + " values, expected 1 or p = " + std::to_string(p));
      for (std::size_t l = 0; l < parts.size(); ++l) spec.alpha[l] = parse_number(parts[l], "--alpha");
    }
  }
  spec.validate();
  return spec;
}

TrendBasis build_trend(const std::string& text) {
  if (text == "constant") return TrendBasis::constant();
  if (text == "linear") return TrendBasis::linear();
  if (text == "zero") return TrendBasis::zero();
  if (text.rfind("file:", 0) == 0) return TrendBasis::explicit_matrix(read_matrix_csv(text.substr(5)));
  fail(ErrorCode::kInvalidArgument, "--trend must be constant|linear|zero|file:<path>, got '" + text + "'");
}

FitOptions build_options(const FitArgs& a, const Globals& g) {
  FitOptions o;
  o.prior = parse_prior_choice(a.prior);
  o.prior_scale = parse_scale_rule(a.prior_scale);
  if (a.nugget_est) {
    o.nugget = NuggetSpec::estimated();
  } else if (a.nugget) {
    require(*a.nugget >= 0.0, "--nugget must be non-negative");
    o.nugget = *a.nugget == 0.0 ? NuggetSpec::noise_free() : NuggetSpec::fixed(*a.nugget);
  }
  o.lower_bound = a.lower_bound;
  o.multiple_starts = a.multiple_starts;
  o.max_eval = a.max_eval;
  o.xtol_rel = a.xtol_rel;
  o.threads = g.threads;
  return o;
}

void print_fit_summary(const Emulator& m) {
  std::ostringstream os;
  os << "beta_hat:";
  for (Eigen::Index l = 0; l < m.beta_hat.size(); ++l) os << ' ' << format_double(m.beta_hat[l]);
  os << "\nrange (gamma_hat):";
  for (Eigen::Index l = 0; l < m.beta_hat.size(); ++l) os << ' ' << format_double(1.0 / m.beta_hat[l]);
  os << "\neta_hat: " << format_double(m.eta_hat);
  for (Eigen::Index j = 0; j < m.k() && j < 5; ++j) {
    os << "\noutput " << j + 1 << ": theta_hat =";
    for (Eigen::Index i = 0; i < m.theta_hat.rows(); ++i) os << ' ' << format_double(m.theta_hat(i, j));
    os << ", sigma2_hat = " << format_double(m.sigma2_hat[j]);
  }
  if (m.k() > 5) os << "\n(" << m.k() - 5 << " more outputs in the model file)";
  os << "\nlog posterior: " << format_double(m.diagnostics.objective);
  const auto& best = m.diagnostics.starts[static_cast<std::size_t>(m.diagnostics.best_start)];
  os << "\noptimizer: " << best.status << " after " << best.evaluations << " evaluations ("
     << m.diagnostics.starts.size() << " start" << (m.diagnostics.starts.size() == 1 ? "" : "s") << ")\n";
  std::cout << os.str();
  if (m.diagnostics.degenerate) {
    std::cerr << "warning: the objective is flat toward a boundary of the parameter space; the estimate is degenerate\n";
  }
  if (m.diagnostics.at_lower_bound) std::cerr << "warning: some beta_hat sit at the lower bound\n";
}

int run_fit(const FitArgs& a, const Globals& g, bool multi_output) {
  const Eigen::MatrixXd design = read_matrix_csv(a.design);
  const Eigen::MatrixXd response = read_matrix_csv(a.response);
  if (!multi_output) {
    require(response.cols() == 1, "fit expects a single response column, found " + std::to_string(response.cols()) +
                                      "; use ppfit for vector outputs");
  }
  const KernelSpec spec = build_kernel(a, design.cols());
  const TrendBasis trend = build_trend(a.trend);
  const FitOptions options = build_options(a, g);
  const Emulator model = fit_emulator(design, response, trend, spec, options);
  save_model(a.out, model, multi_output ? ModelKind::kPPGaSP : ModelKind::kGaSP);
  if (!g.quiet) print_fit_summary(model);
  return kExitOk;
}

std::optional<Eigen::MatrixXd> testing_trend(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return read_matrix_csv(path);
}

SdKind parse_sd_kind(const std::string& text) {
  if (text == "t") return SdKind::kStudentT;
  if (text == "scale") return SdKind::kScale;
  fail(ErrorCode::kInvalidArgument, "--sd-kind must be t|scale, got '" + text + "'");
}

GaSPModel load_scalar(const std::string& path) {
  LoadedModel loaded = load_model(path);
  require(loaded.model.k() == 1, "model has " + std::to_string(loaded.model.k()) + " outputs; use pppredict");
  GaSPModel m;
  static_cast<Emulator&>(m) = std::move(loaded.model);
  return m;
}

int run_predict(const PredictArgs& a, const Globals& g) {
  const GaSPModel model = load_scalar(a.model);
  const Eigen::MatrixXd x = read_matrix_csv(a.input);
  const PredictiveSummary pred = predict(model, x, testing_trend(a.trend_file), parse_sd_kind(a.sd_kind));
  Eigen::MatrixXd out(x.rows(), 4);
  out << pred.mean, pred.sd, pred.lower95, pred.upper95;
  write_csv(a.out, out, {"mean", "sd", "lower95", "upper95"});
  if (pred.sd_is_scale && a.sd_kind == "t" && !g.quiet) {
    std::cerr << "note: degrees of freedom " << pred.dof << " <= 2; the sd column holds the t scale\n";
  }
  return kExitOk;
}

int run_simulate(const SimulateArgs& a, const Globals&) {
  const GaSPModel model = load_scalar(a.model);
  const Eigen::MatrixXd x = read_matrix_csv(a.input);
  const Eigen::MatrixXd draws = simulate(model, x, a.num_sample, a.seed, testing_trend(a.trend_file));
  write_csv(a.out, draws, column_names("sample", draws.cols()));
  return kExitOk;
}

int run_loo(const std::string& model_path, const std::string& out_path, const Globals&) {
  const GaSPModel model = load_scalar(model_path);
  const LooResult loo = leave_one_out(model);
  Eigen::MatrixXd out(model.n(), 4);
  out.col(0) = Eigen::VectorXd::LinSpaced(model.n(), 1.0, static_cast<double>(model.n()));
  out.col(1) = loo.mean;
  out.col(2) = loo.sd;
  out.col(3) = loo.std_resid;
  write_csv(out_path, out, {"index", "loo_mean", "loo_sd", "std_resid"});
  return kExitOk;
}

int run_inert(const std::string& model_path, double threshold, const Globals& g) {
  const LoadedModel loaded = load_model(model_path);
  const InertReport report = find_inert_inputs(loaded.model, threshold);
  if (!report.warning.empty() && !g.quiet) std::cerr << "warning: " << report.warning << "\n";
  std::printf("%-9s %14s %14s %10s %s\n", "dimension", "C_l", "beta_hat", "P_l", "flagged");
  for (Eigen::Index l = 0; l < report.P.size(); ++l) {
    const bool flagged = report.P[l] < report.threshold;
    std::printf("%-9ld %14.6g %14.6g %10.4f %s\n", static_cast<long>(l + 1), report.C[l], report.beta[l],
                report.P[l], flagged ? "yes" : "no");
  }
  return kExitOk;
}

int run_pppredict(const PredictArgs& a, const std::string& prefix, const Globals&) {
  LoadedModel loaded = load_model(a.model);
  PPGaSPModel model;
  static_cast<Emulator&>(model) = std::move(loaded.model);
  const Eigen::MatrixXd x = read_matrix_csv(a.input);
  const PPPredictiveSummary pred = predict_ppgasp(model, x, testing_trend(a.trend_file), parse_sd_kind(a.sd_kind));
  const auto names = column_names("y", model.k());
  write_csv(prefix + "mean.csv", pred.mean, names);
  write_csv(prefix + "sd.csv", pred.sd, names);
  write_csv(prefix + "lower95.csv", pred.lower95, names);
  write_csv(prefix + "upper95.csv", pred.upper95, names);
  return kExitOk;
}

int run_gen(const GenArgs& a, const Globals& g) {
  const TestFunction fn = parse_test_function(a.fn);
  const int p = input_dimension(fn);
  require(a.n >= 2, "--n must be at least 2");
  Eigen::MatrixXd unit;
  if (a.equispaced) {
    require(p == 1, std::string("--equispaced needs a one-input function; ") + to_string(fn) + " has " +
                        std::to_string(p));
    require(!a.maximin, "--equispaced and --maximin are mutually exclusive");
    unit = equispaced(a.n, 0.0, 1.0);
  } else {
    unit = a.maximin ? maximin_lhs(a.n, p, a.seed).points : lhs(a.n, p, a.seed).points;
  }
  const Eigen::MatrixXd design = rescale(unit, domain_lower(fn), domain_upper(fn));
  const Eigen::VectorXd y = evaluate(fn, design);
  write_csv(a.out_design, design, column_names("x", p));
  write_csv(a.out_response, y, {"y"});
  if (!g.quiet) std::cout << "wrote " << a.n << " points of " << to_string(fn) << "\n";
  return kExitOk;
}

int run_bench_cmd(const BenchArgs& a, const Globals& g) {
  std::vector<std::int64_t> seeds;
  for (const auto& s : split_list(a.seeds)) seeds.push_back(static_cast<std::int64_t>(parse_number(s, "--seeds")));
  const BenchReport report = run_bench(a.experiment, seeds, g.threads);
  if (!a.out.empty()) write_text_file(a.out, bench_to_csv(report));
  if (!g.quiet) std::cout << bench_table(report);
  return kExitOk;
}

void add_fit_flags(CLI::App* cmd, FitArgs& a) {
  cmd->add_option("--design", a.design, "design CSV (n x p)")->required();
  cmd->add_option("--response", a.response, "response CSV (n rows)")->required();
  cmd->add_option("--kernel", a.kernel, "matern_5_2|matern_3_2|pow_exp, or a comma list with one per input");
  cmd->add_option("--alpha", a.alpha, "pow_exp roughness in (0, 2]; one value or a comma list (default 1.9)");
  cmd->add_option("--trend", a.trend, "constant|linear|zero|file:<path>");
  cmd->add_option("--prior", a.prior, "jr|ref_gamma|ref_xi|flat");
  cmd->add_option("--prior-scale", a.prior_scale, "JR prior scale constants: range|mean_pairwise");
  auto* est = cmd->add_flag("--nugget-est", a.nugget_est, "estimate the nugget-variance ratio");
  cmd->add_option("--nugget", a.nugget, "fixed nugget-variance ratio")->excludes(est);
  cmd->add_flag("--lower-bound,!--no-lower-bound", a.lower_bound,
                "enforce the default lower bound on beta (disable before inert screening)");
  cmd->add_flag("--multiple-starts", a.multiple_starts, "also start from half the JR prior mean");
  cmd->add_option("--max-eval", a.max_eval, "objective evaluations per start")->check(CLI::PositiveNumber);
  cmd->add_option("--xtol-rel", a.xtol_rel, "relative step tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--out", a.out, "model JSON to write")->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian stochastic process emulation: fit, predict, diagnose."};
  app.require_subcommand(1);
  Globals g;
  g.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  app.add_option("--threads", g.threads, "worker threads (default: all cores)")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", g.quiet, "suppress summaries");

  FitArgs fit_args, ppfit_args;
  auto* fit_cmd = app.add_subcommand("fit", "fit a scalar-output emulator");
  add_fit_flags(fit_cmd, fit_args);
  auto* ppfit_cmd = app.add_subcommand("ppfit", "fit a multi-output (parallel partial) emulator");
  add_fit_flags(ppfit_cmd, ppfit_args);

  PredictArgs predict_args;
  auto* predict_cmd = app.add_subcommand("predict", "predictive mean, sd and 95% interval");
  predict_cmd->add_option("--model", predict_args.model)->required();
  predict_cmd->add_option("--input", predict_args.input)->required();
  predict_cmd->add_option("--trend-file", predict_args.trend_file, "trend basis at the inputs (file: trends)");
  predict_cmd->add_option("--out", predict_args.out)->required();
  predict_cmd->add_option("--sd-kind", predict_args.sd_kind,
                          "t: standard deviation of the predictive t law; scale: its scale parameter")
      ->check(CLI::IsMember({"t", "scale"}));

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "joint draws from the predictive distribution");
  sim_cmd->add_option("--model", sim_args.model)->required();
  sim_cmd->add_option("--input", sim_args.input)->required();
  sim_cmd->add_option("--trend-file", sim_args.trend_file);
  sim_cmd->add_option("--num-sample", sim_args.num_sample)->required()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", sim_args.seed);
  sim_cmd->add_option("--out", sim_args.out)->required();

  std::string loo_model, loo_out;
  auto* loo_cmd = app.add_subcommand("loo", "leave-one-out predictions at the design points");
  loo_cmd->add_option("--model", loo_model)->required();
  loo_cmd->add_option("--out", loo_out)->required();

  std::string inert_model;
  double threshold = 0.1;
  auto* inert_cmd = app.add_subcommand(
      "inert", "flag inputs with small normalized inverse range (best fitted with --no-lower-bound)");
  inert_cmd->add_option("--model", inert_model)->required();
  inert_cmd->add_option("--threshold", threshold)->check(CLI::NonNegativeNumber);

  PredictArgs pp_args;
  std::string prefix;
  auto* pppredict_cmd = app.add_subcommand("pppredict", "predict every output of a ppfit model");
  pppredict_cmd->add_option("--model", pp_args.model)->required();
  pppredict_cmd->add_option("--input", pp_args.input)->required();
  pppredict_cmd->add_option("--trend-file", pp_args.trend_file);
  pppredict_cmd->add_option("--out-prefix", prefix, "writes <prefix>mean.csv, sd.csv, lower95.csv, upper95.csv")
      ->required();
  pppredict_cmd->add_option("--sd-kind", pp_args.sd_kind)->check(CLI::IsMember({"t", "scale"}));

  GenArgs gen_args;
  auto* gen_cmd = app.add_subcommand(
      "gen", "sample a design and evaluate a test function (sinewave is 3 sin(5 pi x) x + cos(7 pi x))");
  gen_cmd->add_option("--fn", gen_args.fn, "borehole|friedman5|higdon1|sinewave")->required();
  gen_cmd->add_option("--n", gen_args.n)->required();
  gen_cmd->add_option("--seed", gen_args.seed);
  gen_cmd->add_flag("--maximin", gen_args.maximin);
  gen_cmd->add_flag("--equispaced", gen_args.equispaced);
  gen_cmd->add_option("--out-design", gen_args.out_design)->required();
  gen_cmd->add_option("--out-response", gen_args.out_response)->required();

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "run a benchmark experiment");
  bench_cmd->add_option("--experiment", bench_args.experiment, "sinewave|friedman|borehole-inert|ppgasp-scaling")
      ->required();
  bench_cmd->add_option("--seeds", bench_args.seeds, "comma-separated seeds");
  bench_cmd->add_option("--out", bench_args.out, "report CSV");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*fit_cmd) return run_fit(fit_args, g, false);
    if (*ppfit_cmd) return run_fit(ppfit_args, g, true);
    if (*predict_cmd) return run_predict(predict_args, g);
    if (*sim_cmd) return run_simulate(sim_args, g);
    if (*loo_cmd) return run_loo(loo_model, loo_out, g);
    if (*inert_cmd) return run_inert(inert_model, threshold, g);
    if (*pppredict_cmd) return run_pppredict(pp_args, prefix, g);
    if (*gen_cmd) return run_gen(gen_args, g);
    if (*bench_cmd) return run_bench_cmd(bench_args, g);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return e.error_class() == ErrorClass::kNumerical ? kExitNumerical : kExitContract;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
