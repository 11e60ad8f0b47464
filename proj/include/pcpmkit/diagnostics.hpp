#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "pcpmkit/errors.hpp"
#include "pcpmkit/problem.hpp"
#include "pcpmkit/solvers.hpp"
#include "pcpmkit/stepsize.hpp"

namespace pcpmkit {

/// Step-size bound curves over a ||A|| grid, one row per grid point.
struct CurveTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  const std::vector<double>& row(std::size_t i) const { return rows.at(i); }

  std::vector<double> column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw ParameterError("CurveTable: no column named " + name);
    const std::size_t j = static_cast<std::size_t>(it - columns.begin());
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[j]);
    return out;
  }

  void write_csv(std::ostream& os) const {
    for (std::size_t j = 0; j < columns.size(); ++j)
      os << columns[j] << (j + 1 < columns.size() ? ',' : '\n');
    os << std::setprecision(17);
    for (const auto& r : rows)
      for (std::size_t j = 0; j < r.size(); ++j) os << r[j] << (j + 1 < r.size() ? ',' : '\n');
  }
};

inline std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2)
    throw ParameterError("log_grid: need 0 < lo < hi and count >= 2");
  std::vector<double> g(static_cast<std::size_t>(count));
  const double step = (std::log10(hi) - std::log10(lo)) / (count - 1);
  for (int i = 0; i < count; ++i) g[static_cast<std::size_t>(i)] = std::pow(10.0, std::log10(lo) + i * step);
  return g;
}

/// Evaluates the original, he and new bounds over a ||A|| grid, plus the
/// ratio columns he/original and new/original. Same code path as the
/// stepsize functions, by construction.
inline CurveTable emit_stepsize_curves(const std::vector<double>& grid, double gamma) {
  if (grid.empty()) throw ParameterError("emit_stepsize_curves: grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0)) throw ParameterError("emit_stepsize_curves: grid values must be positive");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw ParameterError("emit_stepsize_curves: grid must be strictly increasing");
  }
  detail::require_gamma_open_0_2(gamma, "emit_stepsize_curves");

  CurveTable t;
  t.columns = {"norm_a", "original", "he", "new", "he_over_original", "new_over_original"};
  t.rows.reserve(grid.size());
  for (const double a : grid) {
    const double orig = bound_original(a);
    const double he = bound_he(a);
    const double nw = bound_new(a, gamma);
    t.rows.push_back({a, orig, he, nw, he / orig, nw / orig});
  }
  return t;
}

enum class SweepVerdict { Converged, Diverged, Undecided };

inline const char* to_string(SweepVerdict v) {
  switch (v) {
    case SweepVerdict::Converged: return "converged";
    case SweepVerdict::Diverged: return "diverged";
    case SweepVerdict::Undecided: return "undecided";
  }
  return "?";
}

struct SweepPoint {
  double lambda = 0.0;
  SweepVerdict verdict = SweepVerdict::Undecided;
  RunReport report;
  std::string error;  // nonempty when the run itself failed
};

struct SweepResult {
  std::vector<SweepPoint> points;
  double gamma = 1.0;
  std::optional<BoundReport> bounds;          // splitting problems
  std::optional<double> general_bound;        // general problems, tau = sigma = lambda

  void write_csv(std::ostream& os) const {
    os << "lambda,verdict,iterations,final_primal_residual,final_objective";
    if (bounds) os << ",bound_original,bound_shefi,bound_he,bound_new";
    if (general_bound) os << ",bound_general";
    os << '\n';
    os << std::setprecision(17);
    for (const auto& pt : points) {
      os << pt.lambda << ',' << to_string(pt.verdict) << ',' << pt.report.iterations << ','
         << pt.report.final_residuals.primal << ',' << pt.report.final_residuals.objective;
      if (bounds)
        os << ',' << bounds->original << ',' << bounds->shefi << ',' << bounds->he << ','
           << bounds->new_bound;
      if (general_bound) os << ',' << *general_bound;
      os << '\n';
    }
  }
};

namespace detail {
inline SolverConfig sweep_config(Algorithm algo, double lambda, double gamma,
                                 const RunOptions& opts) {
  switch (algo) {
    case Algorithm::PCPM: return SolverConfig::pcpm(lambda, opts);
    case Algorithm::GPCPM1: return SolverConfig::gpcpm1(lambda, gamma, opts);
    case Algorithm::GPCPM2: return SolverConfig::gpcpm2(lambda, gamma, opts);
    case Algorithm::GPCPM3:
      // reduction parameters: tau = sigma = lambda per grid point
      return SolverConfig::gpcpm3(lambda, gamma, lambda, lambda, opts);
  }
  throw ParameterError("sweep_config: unknown algorithm");
}
}  // namespace detail

/// Independent solver runs over a lambda grid. Points run concurrently
/// (up to `threads`; 0 means hardware concurrency); assembly is by grid
/// order, per-point failures are captured in the point.
inline SweepResult sweep_lambda(const ProblemInstance& pr, Algorithm algo, double gamma,
                                const std::vector<double>& lambda_grid, const RunOptions& opts,
                                int threads = 0) {
  if (lambda_grid.empty()) throw ParameterError("sweep_lambda: grid is empty");
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] > 0.0)) throw ParameterError("sweep_lambda: grid values must be positive");
    if (i > 0 && !(lambda_grid[i] > lambda_grid[i - 1]))
      throw ParameterError("sweep_lambda: grid must be strictly increasing");
  }
  if (algo == Algorithm::PCPM && gamma != 1.0)
    throw ParameterError("sweep_lambda: pcpm has fixed gamma = 1");

  SweepResult result;
  result.gamma = gamma;
  const double norm_a = spectral_norm(pr.A()).value;
  if (pr.form() == ProblemForm::Splitting) {
    result.bounds = compute_bounds(norm_a, algo == Algorithm::PCPM ? 1.0 : gamma);
  } else {
    const double norm_b = spectral_norm(pr.B()).value;
    const double g = algo == Algorithm::PCPM ? 1.0 : gamma;
    result.general_bound =
        std::sqrt(4.0 / ((2.0 + g) * (norm_a * norm_a + norm_b * norm_b)));
  }

  result.points.resize(lambda_grid.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= lambda_grid.size()) return;
      SweepPoint& pt = result.points[i];
      pt.lambda = lambda_grid[i];
      try {
        pt.report = solve(pr, detail::sweep_config(algo, pt.lambda, gamma, opts));
        pt.verdict = pt.report.converged    ? SweepVerdict::Converged
                     : pt.report.divergence_flag ? SweepVerdict::Diverged
                                                 : SweepVerdict::Undecided;
      } catch (const std::exception& e) {
        pt.verdict = SweepVerdict::Undecided;
        pt.error = e.what();
      }
    }
  };

  int nthreads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  nthreads = std::max(1, std::min<int>(nthreads, static_cast<int>(lambda_grid.size())));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return result;
}

}  // namespace pcpmkit
