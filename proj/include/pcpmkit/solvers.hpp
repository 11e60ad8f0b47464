#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pcpmkit/errors.hpp"
#include "pcpmkit/problem.hpp"
#include "pcpmkit/stepsize.hpp"

namespace pcpmkit {

enum class Algorithm { PCPM, GPCPM1, GPCPM2, GPCPM3 };

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::PCPM: return "pcpm";
    case Algorithm::GPCPM1: return "gpcpm1";
    case Algorithm::GPCPM2: return "gpcpm2";
    case Algorithm::GPCPM3: return "gpcpm3";
  }
  return "?";
}

struct RunOptions {
  double tol = 1e-8;
  int max_iter = 20000;
  bool record_history = false;
};

/// Algorithm choice plus parameters. Built through the per-algorithm
/// factories so parameter/algorithm consistency holds by construction:
/// gamma only for the generalized schemes, tau/sigma only for GPCPM3.
class SolverConfig {
 public:
  static SolverConfig pcpm(double lambda, RunOptions opts = {}) {
    return SolverConfig(Algorithm::PCPM, lambda, 1.0, std::nullopt, std::nullopt, opts);
  }
  static SolverConfig gpcpm1(double lambda, double gamma, RunOptions opts = {}) {
    return SolverConfig(Algorithm::GPCPM1, lambda, gamma, std::nullopt, std::nullopt, opts);
  }
  static SolverConfig gpcpm2(double lambda, double gamma, RunOptions opts = {}) {
    return SolverConfig(Algorithm::GPCPM2, lambda, gamma, std::nullopt, std::nullopt, opts);
  }
  static SolverConfig gpcpm3(double lambda, double gamma, double tau, double sigma,
                             RunOptions opts = {}) {
    if (!(tau > 0.0) || !(sigma > 0.0))
      throw ParameterError("SolverConfig: tau and sigma must be positive");
    return SolverConfig(Algorithm::GPCPM3, lambda, gamma, tau, sigma, opts);
  }

  Algorithm algorithm() const { return algorithm_; }
  double lambda() const { return lambda_; }
  double gamma() const { return gamma_; }
  double tau() const { return require_three("tau"), *tau_; }
  double sigma() const { return require_three("sigma"), *sigma_; }
  double tol() const { return opts_.tol; }
  int max_iter() const { return opts_.max_iter; }
  bool record_history() const { return opts_.record_history; }
  const RunOptions& options() const { return opts_; }

 private:
  SolverConfig(Algorithm algorithm, double lambda, double gamma, std::optional<double> tau,
               std::optional<double> sigma, RunOptions opts)
      : algorithm_(algorithm), lambda_(lambda), gamma_(gamma), tau_(tau), sigma_(sigma), opts_(opts) {
    if (!(lambda_ > 0.0)) throw ParameterError("SolverConfig: lambda must be positive");
    if (algorithm_ != Algorithm::PCPM) detail::require_gamma_open_0_2(gamma_, "SolverConfig");
    if (!(opts_.tol > 0.0)) throw ParameterError("SolverConfig: tol must be positive");
    if (opts_.max_iter <= 0) throw ParameterError("SolverConfig: max_iter must be positive");
  }

  void require_three(const char* what) const {
    if (algorithm_ != Algorithm::GPCPM3)
      throw ParameterError(std::string("SolverConfig: ") + what + " only exists for gpcpm3");
  }

  Algorithm algorithm_;
  double lambda_;
  double gamma_;
  std::optional<double> tau_, sigma_;
  RunOptions opts_;
};

/// One iterate: primal pair (x, z), multiplier y, and the predictor p that
/// produced it. k counts completed iterations.
struct IterateState {
  Eigen::VectorXd x, z, y, p;
  int k = 0;

  bool all_finite() const { return x.allFinite() && z.allFinite() && y.allFinite(); }
  double stacked_norm() const {
    return std::sqrt(x.squaredNorm() + z.squaredNorm() + y.squaredNorm());
  }
};

inline IterateState zero_start(const ProblemInstance& p) {
  IterateState s;
  s.x = Eigen::VectorXd::Zero(p.n());
  s.z = Eigen::VectorXd::Zero(p.z_dim());
  s.y = Eigen::VectorXd::Zero(p.m());
  s.p = Eigen::VectorXd::Zero(p.m());
  return s;
}

struct RunReport {
  bool converged = false;
  int iterations = 0;
  SaddlePointResidual final_residuals{};
  IterateState final_state{};
  std::vector<double> objective_trace;        // per iteration when recorded
  std::vector<double> primal_residual_trace;  // per iteration when recorded
  bool divergence_flag = false;               // iterate norm guard tripped or non-finite
  std::vector<std::string> warnings;
};

// iterate norm beyond this trips the divergence flag
inline constexpr double kDivergenceGuard = 1e12;

/// One predictor-corrector step with dual relaxation gamma:
///   p    <- y + lambda (A x - z)
///   x'   <- prox_f(x - lambda A^T p; lambda)
///   z'   <- prox_g(z + lambda p; lambda)
///   y'   <- y + gamma lambda (A x' - z')
/// gamma = 1 is the plain PCPM step.
inline IterateState gpcpm1_step(const ProblemInstance& pr, double lambda, double gamma,
                                const IterateState& s) {
  IterateState next;
  next.p = s.y + lambda * (pr.A() * s.x - s.z);
  next.x = pr.f().prox(s.x - lambda * (pr.A().transpose() * next.p), lambda);
  next.z = pr.g().prox(s.z + lambda * next.p, lambda);
  next.y = s.y + (gamma * lambda) * (pr.A() * next.x - next.z);
  next.k = s.k + 1;
  return next;
}

inline IterateState pcpm_step(const ProblemInstance& pr, double lambda, const IterateState& s) {
  return gpcpm1_step(pr, lambda, 1.0, s);
}

/// Relaxed-PPA step: a full PCPM pass produces the tilde point, then the new
/// iterate is w - gamma (w - w_tilde) on the stacked w = (x, z, y).
inline IterateState gpcpm2_step(const ProblemInstance& pr, double lambda, double gamma,
                                const IterateState& s) {
  IterateState tilde = pcpm_step(pr, lambda, s);
  IterateState next;
  next.x = s.x - gamma * (s.x - tilde.x);
  next.z = s.z - gamma * (s.z - tilde.z);
  next.y = s.y - gamma * (s.y - tilde.y);
  next.p = tilde.p;
  next.k = s.k + 1;
  return next;
}

/// Two-block step for A x + B z = b with separate primal steps tau, sigma:
///   p  <- y + lambda (A x + B z - b)
///   x' <- prox_f(x - tau A^T p; tau)
///   z' <- prox_g(z - sigma B^T p; sigma)
///   y' <- y + gamma lambda (A x' + B z' - b)
inline IterateState gpcpm3_step(const ProblemInstance& pr, double lambda, double gamma, double tau,
                                double sigma, const IterateState& s) {
  IterateState next;
  next.p = s.y + lambda * (pr.A() * s.x + pr.B() * s.z - pr.b());
  next.x = pr.f().prox(s.x - tau * (pr.A().transpose() * next.p), tau);
  next.z = pr.g().prox(s.z - sigma * (pr.B().transpose() * next.p), sigma);
  next.y = s.y + (gamma * lambda) * (pr.A() * next.x + pr.B() * next.z - pr.b());
  next.k = s.k + 1;
  return next;
}

namespace detail {

inline void check_start(const ProblemInstance& pr, const IterateState& s) {
  if (s.x.size() != pr.n())
    throw DimensionError("solver start: x has length " + std::to_string(s.x.size()) +
                         ", expected n = " + std::to_string(pr.n()));
  if (s.z.size() != pr.z_dim())
    throw DimensionError("solver start: z has length " + std::to_string(s.z.size()) +
                         ", expected " + std::to_string(pr.z_dim()));
  if (s.y.size() != pr.m())
    throw DimensionError("solver start: y has length " + std::to_string(s.y.size()) +
                         ", expected m = " + std::to_string(pr.m()));
}

/// Shared iteration loop: step, guard, residuals, history, stopping.
template <class StepFn>
RunReport run_iterations(const ProblemInstance& pr, const RunOptions& opts, IterateState state,
                         StepFn&& step) {
  check_start(pr, state);
  RunReport report;

  SaddlePointResidual res = residuals(pr, state.x, state.z, state.y);
  if (res.max_residual() <= opts.tol) {
    report.converged = true;
    report.final_residuals = res;
    report.final_state = std::move(state);
    return report;
  }

  for (int k = 1; k <= opts.max_iter; ++k) {
    state = step(state);
    report.iterations = k;
    if (!state.all_finite() || state.stacked_norm() > kDivergenceGuard) {
      report.divergence_flag = true;
      if (opts.record_history) {
        report.objective_trace.push_back(std::numeric_limits<double>::quiet_NaN());
        report.primal_residual_trace.push_back(std::numeric_limits<double>::quiet_NaN());
      }
      break;
    }
    res = residuals(pr, state.x, state.z, state.y);
    if (opts.record_history) {
      report.objective_trace.push_back(res.objective);
      report.primal_residual_trace.push_back(res.primal);
    }
    if (res.max_residual() <= opts.tol) {
      report.converged = true;
      break;
    }
  }

  report.final_residuals = res;
  report.final_state = std::move(state);
  return report;
}

/// Bound check at run start; violations attach a warning, the run proceeds.
inline void attach_bound_warning(const ProblemInstance& pr, const SolverConfig& cfg,
                                 RunReport& report) {
  const SpectralNormResult na = spectral_norm(pr.A());
  if (!na.converged)
    report.warnings.push_back("spectral norm of A did not converge; bound check is approximate");
  if (cfg.algorithm() == Algorithm::GPCPM3) {
    const SpectralNormResult nb = spectral_norm(pr.B());
    if (!nb.converged)
      report.warnings.push_back("spectral norm of B did not converge; bound check is approximate");
    if (!check_general_condition(cfg.lambda(), cfg.tau(), cfg.sigma(), cfg.gamma(),
                                 na.value * na.value, nb.value * nb.value)) {
      report.warnings.push_back(
          "step sizes violate lambda*tau*||A^T A|| + lambda*sigma*||B^T B|| < 4/(2+gamma): " +
          std::to_string(cfg.lambda() * cfg.tau() * na.value * na.value +
                         cfg.lambda() * cfg.sigma() * nb.value * nb.value) +
          " >= " + std::to_string(4.0 / (2.0 + cfg.gamma())));
    }
    return;
  }
  // gpcpm2 relaxes the whole iterate, which needs the positive-definite
  // metric (the he bound); with gamma = 1 it is plain pcpm and the relaxed
  // bound applies
  const double bound = (cfg.algorithm() == Algorithm::GPCPM2 && cfg.gamma() != 1.0)
                           ? bound_he(na.value)
                           : bound_new(na.value, cfg.gamma());
  if (!(cfg.lambda() < bound)) {
    report.warnings.push_back("lambda = " + std::to_string(cfg.lambda()) +
                              " violates the step-size bound " + std::to_string(bound) +
                              " at ||A|| = " + std::to_string(na.value) +
                              ", gamma = " + std::to_string(cfg.gamma()));
  }
}

inline void require_algorithm(const SolverConfig& cfg, Algorithm expected, const char* who) {
  if (cfg.algorithm() != expected)
    throw ParameterError(std::string(who) + ": config is for " + to_string(cfg.algorithm()));
}

inline void require_form(const ProblemInstance& pr, ProblemForm expected, const char* who) {
  if (pr.form() != expected)
    throw FormError(std::string(who) + ": requires a " +
                    std::string(to_string(expected)) + "-form problem");
}

template <class StepFn>
RunReport run_with_warnings(const ProblemInstance& pr, const SolverConfig& cfg, IterateState start,
                            StepFn&& step) {
  RunReport warn_holder;
  attach_bound_warning(pr, cfg, warn_holder);
  RunReport report = run_iterations(pr, cfg.options(), std::move(start), step);
  report.warnings.insert(report.warnings.begin(), warn_holder.warnings.begin(),
                         warn_holder.warnings.end());
  return report;
}

}  // namespace detail

inline RunReport run_pcpm(const ProblemInstance& pr, const SolverConfig& cfg, IterateState start) {
  detail::require_algorithm(cfg, Algorithm::PCPM, "run_pcpm");
  detail::require_form(pr, ProblemForm::Splitting, "run_pcpm");
  const double lambda = cfg.lambda();
  return detail::run_with_warnings(pr, cfg, std::move(start),
                                   [&](const IterateState& s) { return pcpm_step(pr, lambda, s); });
}

inline RunReport run_gpcpm1(const ProblemInstance& pr, const SolverConfig& cfg, IterateState start) {
  detail::require_algorithm(cfg, Algorithm::GPCPM1, "run_gpcpm1");
  detail::require_form(pr, ProblemForm::Splitting, "run_gpcpm1");
  const double lambda = cfg.lambda();
  const double gamma = cfg.gamma();
  return detail::run_with_warnings(
      pr, cfg, std::move(start),
      [&](const IterateState& s) { return gpcpm1_step(pr, lambda, gamma, s); });
}

inline RunReport run_gpcpm2(const ProblemInstance& pr, const SolverConfig& cfg, IterateState start) {
  detail::require_algorithm(cfg, Algorithm::GPCPM2, "run_gpcpm2");
  detail::require_form(pr, ProblemForm::Splitting, "run_gpcpm2");
  const double lambda = cfg.lambda();
  const double gamma = cfg.gamma();
  return detail::run_with_warnings(
      pr, cfg, std::move(start),
      [&](const IterateState& s) { return gpcpm2_step(pr, lambda, gamma, s); });
}

inline RunReport run_gpcpm3(const ProblemInstance& pr, const SolverConfig& cfg, IterateState start) {
  detail::require_algorithm(cfg, Algorithm::GPCPM3, "run_gpcpm3");
  detail::require_form(pr, ProblemForm::General, "run_gpcpm3");
  const double lambda = cfg.lambda();
  const double gamma = cfg.gamma();
  const double tau = cfg.tau();
  const double sigma = cfg.sigma();
  return detail::run_with_warnings(
      pr, cfg, std::move(start),
      [&](const IterateState& s) { return gpcpm3_step(pr, lambda, gamma, tau, sigma, s); });
}

inline RunReport solve(const ProblemInstance& pr, const SolverConfig& cfg, IterateState start) {
  switch (cfg.algorithm()) {
    case Algorithm::PCPM: return run_pcpm(pr, cfg, std::move(start));
    case Algorithm::GPCPM1: return run_gpcpm1(pr, cfg, std::move(start));
    case Algorithm::GPCPM2: return run_gpcpm2(pr, cfg, std::move(start));
    case Algorithm::GPCPM3: return run_gpcpm3(pr, cfg, std::move(start));
  }
  throw ParameterError("solve: unknown algorithm");
}

inline RunReport solve(const ProblemInstance& pr, const SolverConfig& cfg) {
  return solve(pr, cfg, zero_start(pr));
}

}  // namespace pcpmkit
