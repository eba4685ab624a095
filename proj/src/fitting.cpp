#include "robustgasp/fitting.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "robustgasp/errors.hpp"

namespace rgasp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Unpacked {
  Eigen::VectorXd beta;
  double eta;
};

Unpacked unpack(const Emulator& m, const Eigen::VectorXd& omega) {
  const Eigen::Index p = m.kernel.dims();
  Unpacked u{omega.head(p).array().exp().matrix(), 0.0};
  switch (m.options.nugget.mode) {
    case NuggetSpec::Mode::kNoiseFree: u.eta = 0.0; break;
    case NuggetSpec::Mode::kFixed: u.eta = m.options.nugget.eta; break;
    case NuggetSpec::Mode::kEstimated: u.eta = std::exp(omega[p]); break;
  }
  return u;
}

bool try_build(const Emulator& m, const Eigen::MatrixXd& basis, const Unpacked& u, MarginalState& out) {
  try {
    out = build_state(m.dist, m.response, basis, m.kernel, u.beta, u.eta);
    return true;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kNearSingularCorrelation) return false;
    throw;
  }
}

// Numerical log-prior gradient for the reference priors; the analytic
// derivative of |I*|^{1/2} is not worth its cost.
Eigen::VectorXd numeric_prior_grad(const Emulator& m, const Eigen::MatrixXd& basis, const Eigen::VectorXd& omega) {
  Eigen::VectorXd grad(omega.size());
  for (Eigen::Index i = 0; i < omega.size(); ++i) {
    const double h = 1e-4 * std::max(1.0, std::abs(omega[i]));
    Eigen::VectorXd plus = omega, minus = omega;
    plus[i] += h;
    minus[i] -= h;
    MarginalState sp, sm;
    if (!try_build(m, basis, unpack(m, plus), sp) || !try_build(m, basis, unpack(m, minus), sm)) {
      grad[i] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    grad[i] = (log_prior_value(m, sp) - log_prior_value(m, sm)) / (2.0 * h);
  }
  return grad;
}

void validate_inputs(const Eigen::MatrixXd& design, const Eigen::MatrixXd& response, const KernelSpec& spec,
                     const FitOptions& options) {
  require(design.rows() >= 2, "need at least two design points");
  require(design.rows() == response.rows(), "design has " + std::to_string(design.rows()) +
                                                " rows but response has " + std::to_string(response.rows()));
  require(response.cols() >= 1, "response needs at least one column");
  require(design.allFinite(), "design contains non-finite values");
  require(response.allFinite(), "response contains non-finite values");
  require(spec.dims() == design.cols(), "kernel has " + std::to_string(spec.dims()) +
                                            " dimensions but design has " + std::to_string(design.cols()));
  spec.validate();
  require(options.max_eval >= 1, "max_eval must be at least 1");
  require(options.xtol_rel > 0.0, "xtol_rel must be positive");
  require(options.optimizer_memory >= 1, "optimizer memory must be at least 1");
  if (options.nugget.mode == NuggetSpec::Mode::kFixed) {
    require(std::isfinite(options.nugget.eta) && options.nugget.eta >= 0.0,
            "fixed nugget-variance ratio must be non-negative");
  }
}

// A response column inside the span of the trend has S2 = 0 for every
// (beta, eta), which makes the marginal likelihood improper.
void check_response_not_degenerate(const Eigen::MatrixXd& basis, const Eigen::MatrixXd& response) {
  for (Eigen::Index j = 0; j < response.cols(); ++j) {
    const Eigen::VectorXd y = response.col(j);
    Eigen::VectorXd resid = y;
    if (basis.cols() > 0) resid -= basis * basis.colPivHouseholderQr().solve(y);
    if (resid.norm() <= 1e-12 * std::max(y.norm(), std::numeric_limits<double>::min())) {
      fail(ErrorCode::kDegenerateResponse,
           "response column " + std::to_string(j + 1) +
               " is exactly explained by the trend (e.g. all values equal); the marginal likelihood is improper");
    }
  }
}

Emulator make_skeleton(const Eigen::MatrixXd& design, const Eigen::MatrixXd& response, const TrendBasis& trend,
                       const KernelSpec& spec, const FitOptions& options) {
  Emulator m;
  m.design = design;
  m.response = response;
  m.trend = trend;
  m.kernel = spec;
  m.options = options;
  m.prior_params = default_jr_params(design, options.prior_scale);
  m.beta_lower = default_lower_bound(design);
  m.dist = distances(design, design);
  return m;
}

// The optimizer crawls on numerically flat ridges that continue to the
// boundary of the parameter space (e.g. the likelihood alone as beta -> inf).
// Follow each coordinate outward along its ascent sign with doubling steps
// while the objective stays within round-off of the current value.
bool extend_along_plateaus(const SmoothObjective& negated, const Eigen::VectorXd& lower, LbfgsResult& r) {
  constexpr double kMaxExtension = 64.0;
  bool extended = false;
  for (Eigen::Index i = 0; i < r.x.size(); ++i) {
    if (r.grad[i] == 0.0) continue;
    const double sign = r.grad[i] < 0.0 ? 1.0 : -1.0;  // descent direction of the negated objective
    const double tol = 1e-10 * (1.0 + std::abs(r.value));
    Eigen::VectorXd best_x = r.x, best_g = r.grad;
    double best_f = r.value;
    for (double t = 1.0; t <= kMaxExtension; t *= 2.0) {
      Eigen::VectorXd trial = r.x;
      trial[i] = std::max(trial[i] + sign * t, lower[i]);
      if (trial[i] == best_x[i]) break;
      Eigen::VectorXd g(r.x.size());
      const double f = negated(trial, g);
      ++r.evaluations;
      if (!std::isfinite(f) || f > r.value + tol) break;
      best_x = trial;
      best_g = g;
      best_f = f;
    }
    if (best_x[i] != r.x[i]) {
      r.x = best_x;
      r.grad = best_g;
      r.value = best_f;
      extended = true;
    }
  }
  return extended;
}

StartDiagnostics run_start(const Emulator& skeleton, const Eigen::MatrixXd& basis, const Eigen::VectorXd& start,
                           const Eigen::VectorXd& lower) {
  StartDiagnostics diag;
  diag.initial = start;
  const SmoothObjective negated = [&](const Eigen::VectorXd& omega, Eigen::VectorXd& grad) {
    Eigen::VectorXd g;
    const double v = log_posterior(skeleton, basis, omega, &g);
    if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    grad = -g;
    return -v;
  };
  LbfgsOptions opt;
  opt.max_eval = skeleton.options.max_eval;
  opt.xtol_rel = skeleton.options.xtol_rel;
  opt.memory = skeleton.options.optimizer_memory;
  try {
    LbfgsResult r = minimize_lbfgs(negated, start, lower, opt);
    if (r.status != LbfgsStatus::kInfeasibleStart) diag.extended = extend_along_plateaus(negated, lower, r);
    diag.final = r.x;
    diag.objective = -r.value;
    diag.evaluations = r.evaluations;
    diag.iterations = r.iterations;
    diag.status = to_string(r.status);
    diag.ok = r.status != LbfgsStatus::kInfeasibleStart && std::isfinite(diag.objective);
    if (!diag.ok) diag.message = "correlation matrix not factorizable at the starting point";
  } catch (const Error& e) {
    diag.final = start;
    diag.objective = kNegInf;
    diag.status = "error";
    diag.message = e.what();
  }
  return diag;
}

}  // namespace

Eigen::VectorXd default_lower_bound(const Eigen::MatrixXd& design) {
  const Eigen::VectorXd c = design_scales(design, ScaleRule::kMeanPairwise);
  const double p = static_cast<double>(design.cols());
  return (-std::log(0.99) / p) * c.cwiseInverse();
}

std::vector<Eigen::VectorXd> initial_points(const JRPriorParams& params, const Eigen::VectorXd& beta_lower,
                                            const NuggetSpec& nugget, bool multiple_starts) {
  const Eigen::Index p = beta_lower.size();
  const bool with_eta = nugget.is_estimated();
  const Eigen::Index dim = p + (with_eta ? 1 : 0);

  std::vector<Eigen::VectorXd> starts;
  Eigen::VectorXd first(dim);
  first.head(p) = (50.0 * beta_lower).array().log().matrix();
  if (with_eta) first[p] = std::log(1e-4);
  starts.push_back(first);

  if (multiple_starts) {
    const double pd = static_cast<double>(p);
    Eigen::VectorXd second(dim);
    const Eigen::VectorXd prior_mean = ((params.a + pd) / (params.b * pd)) * params.C.cwiseInverse();
    second.head(p) = (0.5 * prior_mean).array().log().matrix();
    if (with_eta) second[p] = std::log(2e-4);
    starts.push_back(second);
  }
  return starts;
}

double log_prior_value(const Emulator& m, const MarginalState& state) {
  const bool with_eta = m.options.nugget.is_estimated();
  switch (m.options.prior) {
    case PriorChoice::kJointlyRobust: return log_jr_prior(state.beta, state.eta, with_eta, m.prior_params);
    case PriorChoice::kRefGamma:
      return log_ref_prior(state, m.dist, m.kernel, RefParameterization::kGamma, with_eta);
    case PriorChoice::kRefXi: return log_ref_prior(state, m.dist, m.kernel, RefParameterization::kXi, with_eta);
    case PriorChoice::kFlat: return 0.0;
  }
  return 0.0;
}

double log_posterior(const Emulator& m, const Eigen::MatrixXd& basis, const Eigen::VectorXd& omega,
                     Eigen::VectorXd* grad) {
  const bool with_eta = m.options.nugget.is_estimated();
  const Unpacked u = unpack(m, omega);
  MarginalState state;
  if (!try_build(m, basis, u, state)) return kNegInf;
  if (!(state.S2.array() > 0.0).all()) return kNegInf;

  const double value = log_marginal_lik(state) + log_prior_value(m, state);
  if (grad) {
    *grad = log_marginal_lik_grad(state, m.dist, m.kernel, with_eta);
    switch (m.options.prior) {
      case PriorChoice::kJointlyRobust:
        *grad += log_jr_prior_grad(state.beta, state.eta, with_eta, m.prior_params);
        break;
      case PriorChoice::kRefGamma:
      case PriorChoice::kRefXi: *grad += numeric_prior_grad(m, basis, omega); break;
      case PriorChoice::kFlat: break;
    }
  }
  return value;
}

void refresh_cache(Emulator& m) {
  m.dist = distances(m.design, m.design);
  m.state = build_state(m.dist, m.response, eval_basis(m.trend, m.design), m.kernel, m.beta_hat, m.eta_hat);
  m.theta_hat = m.state.theta;
  m.sigma2_hat = m.state.S2 / static_cast<double>(m.state.dof());
}

Emulator make_emulator(const Eigen::MatrixXd& design, const Eigen::MatrixXd& response, const TrendBasis& trend,
                       const KernelSpec& spec, const FitOptions& options, const Eigen::VectorXd& beta, double eta) {
  validate_inputs(design, response, spec, options);
  Emulator m = make_skeleton(design, response, trend, spec, options);
  m.beta_hat = beta;
  m.eta_hat = eta;
  refresh_cache(m);
  return m;
}

Emulator fit_emulator(const Eigen::MatrixXd& design, const Eigen::MatrixXd& response, const TrendBasis& trend,
                      const KernelSpec& spec, const FitOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  validate_inputs(design, response, spec, options);
  const Eigen::MatrixXd basis = eval_basis(trend, design);
  check_degrees_of_freedom(design.rows(), basis.cols());
  check_response_not_degenerate(basis, response);

  Emulator m = make_skeleton(design, response, trend, spec, options);
  const Eigen::Index p = spec.dims();
  const bool with_eta = options.nugget.is_estimated();

  const std::vector<Eigen::VectorXd> starts =
      initial_points(m.prior_params, m.beta_lower, options.nugget, options.multiple_starts);
  Eigen::VectorXd lower = Eigen::VectorXd::Constant(p + (with_eta ? 1 : 0), kNegInf);
  if (options.lower_bound) lower.head(p) = m.beta_lower.array().log().matrix();

  std::vector<StartDiagnostics> diags(starts.size());
  if (options.threads > 1 && starts.size() > 1) {
    std::vector<std::future<StartDiagnostics>> jobs;
    for (const auto& s : starts) jobs.push_back(std::async(std::launch::async, run_start, std::cref(m),
                                                           std::cref(basis), std::cref(s), std::cref(lower)));
    for (std::size_t i = 0; i < jobs.size(); ++i) diags[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < starts.size(); ++i) diags[i] = run_start(m, basis, starts[i], lower);
  }

  int best = -1;
  for (std::size_t i = 0; i < diags.size(); ++i) {
    if (!diags[i].ok) continue;
    if (best < 0) {
      best = static_cast<int>(i);
      continue;
    }
    const auto& cur = diags[static_cast<std::size_t>(best)];
    const double diff = diags[i].objective - cur.objective;
    const bool tie = std::abs(diff) <= 1e-10;
    if ((!tie && diff > 0.0) || (tie && diags[i].final.head(p).sum() < cur.final.head(p).sum())) {
      best = static_cast<int>(i);
    }
  }
  if (best < 0) {
    std::ostringstream os;
    bool all_singular = true;
    for (std::size_t i = 0; i < diags.size(); ++i) {
      os << " [start " << i + 1 << ": " << diags[i].message << "]";
      if (diags[i].status == "error") all_singular = false;
    }
    if (all_singular) {
      fail(ErrorCode::kNearSingularCorrelation,
           "correlation matrix could not be factorized at any starting point; consider --nugget-est." + os.str());
    }
    fail(ErrorCode::kFitFailure, "no optimizer start produced a finite objective:" + os.str());
  }

  const auto& chosen = diags[static_cast<std::size_t>(best)];
  const Unpacked u = unpack(m, chosen.final);
  m.beta_hat = u.beta;
  m.eta_hat = u.eta;
  refresh_cache(m);

  m.diagnostics.starts = diags;
  m.diagnostics.best_start = best;
  m.diagnostics.objective = chosen.objective;
  m.diagnostics.at_lower_bound = false;
  m.diagnostics.degenerate = chosen.extended;
  if (options.lower_bound) {
    for (Eigen::Index l = 0; l < p; ++l) {
      if (chosen.final[l] <= lower[l] + 1e-10) m.diagnostics.at_lower_bound = true;
    }
  }
  m.diagnostics.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return m;
}

GaSPModel fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& response, const TrendBasis& trend,
              const KernelSpec& spec, const FitOptions& options) {
  GaSPModel model;
  static_cast<Emulator&>(model) = fit_emulator(design, Eigen::MatrixXd(response), trend, spec, options);
  return model;
}

GaSPModel fit_flat_mode(const Eigen::MatrixXd& design, const Eigen::VectorXd& response, const TrendBasis& trend,
                        const KernelSpec& spec, FitOptions options) {
  options.prior = PriorChoice::kFlat;
  return fit(design, response, trend, spec, options);
}

}  // namespace rgasp
