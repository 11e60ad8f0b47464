// pcpmkit command-line driver: solve / bounds / curves / sweep /
// verify-equivalence / generate. Exit codes: 0 success, 1 usage or input
// error, 2 contract breach (equivalence deviation above threshold).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pcpmkit/pcpmkit.hpp"

namespace {

using nlohmann::json;

std::vector<double> parse_grid(const std::string& text) {
  // "lo:hi:count"
  const auto first = text.find(':');
  const auto second = text.find(':', first + 1);
  if (first == std::string::npos || second == std::string::npos)
    throw pcpmkit::ParameterError("grid must be lo:hi:count, got: " + text);
  const double lo = std::stod(text.substr(0, first));
  const double hi = std::stod(text.substr(first + 1, second - first - 1));
  const int count = std::stoi(text.substr(second + 1));
  if (!(lo > 0.0) || !(hi > lo) || count < 2)
    throw pcpmkit::ParameterError("grid needs 0 < lo < hi and count >= 2, got: " + text);
  std::vector<double> g(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
  return g;
}

pcpmkit::Algorithm parse_algorithm(const std::string& name) {
  if (name == "pcpm") return pcpmkit::Algorithm::PCPM;
  if (name == "gpcpm1") return pcpmkit::Algorithm::GPCPM1;
  if (name == "gpcpm2") return pcpmkit::Algorithm::GPCPM2;
  if (name == "gpcpm3") return pcpmkit::Algorithm::GPCPM3;
  throw pcpmkit::ParameterError("unknown algorithm: " + name);
}

pcpmkit::GeneratorKind parse_kind(const std::string& name) {
  if (name == "lasso") return pcpmkit::GeneratorKind::Lasso;
  if (name == "random_quad_split") return pcpmkit::GeneratorKind::RandomQuadSplit;
  if (name == "general_two_block") return pcpmkit::GeneratorKind::GeneralTwoBlock;
  throw pcpmkit::ParameterError("unknown generator kind: " + name);
}

int env_threads() {
  if (const char* env = std::getenv("PCPMKIT_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  return 0;  // hardware concurrency
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw pcpmkit::IoError("cannot open file for writing: " + path);
  out << content;
}

/// lambda for --lambda auto: 0.99 of the bound matching the algorithm.
double auto_lambda(const pcpmkit::ProblemInstance& problem, pcpmkit::Algorithm algo, double gamma,
                   std::optional<double> tau, std::optional<double> sigma) {
  const double norm_a = pcpmkit::spectral_norm(problem.A()).value;
  if (algo == pcpmkit::Algorithm::GPCPM2 && gamma != 1.0)
    return 0.99 * pcpmkit::bound_he(norm_a);  // full-iterate relaxation needs the PD metric
  if (algo != pcpmkit::Algorithm::GPCPM3)
    return 0.99 * pcpmkit::bound_new(norm_a, algo == pcpmkit::Algorithm::PCPM ? 1.0 : gamma);
  const double norm_b = pcpmkit::spectral_norm(problem.B()).value;
  const double cap = 4.0 / (2.0 + gamma);
  if (tau && sigma)  // lambda (tau ||A^T A|| + sigma ||B^T B||) < cap
    return 0.99 * cap / (*tau * norm_a * norm_a + *sigma * norm_b * norm_b);
  // tau = sigma = lambda: lambda^2 (||A^T A|| + ||B^T B||) < cap
  return 0.99 * std::sqrt(cap / (norm_a * norm_a + norm_b * norm_b));
}

int run_bounds(double norm_a, double gamma) {
  const pcpmkit::BoundReport r = pcpmkit::compute_bounds(norm_a, gamma);
  const auto line = [](const char* name, double value, bool strict) {
    json j;
    j["bound"] = name;
    j["value"] = value;
    j["strict"] = strict;
    std::cout << j.dump() << '\n';
  };
  line("original", r.original, false);
  line("shefi", r.shefi, false);
  line("he", r.he, true);
  line("new", r.new_bound, true);
  const auto ratio = [](const char* name, double value) {
    json j;
    j["ratio"] = name;
    j["value"] = value;
    std::cout << j.dump() << '\n';
  };
  ratio("he/original", r.he / r.original);
  ratio("new/original", r.new_bound / r.original);
  ratio("new/he", r.new_bound / r.he);
  return 0;
}

int run_solve(const std::string& problem_path, const std::string& algo_name,
              const std::string& lambda_text, double gamma, std::optional<double> tau,
              std::optional<double> sigma, pcpmkit::RunOptions opts, const std::string& out_path) {
  const pcpmkit::ProblemInstance problem = pcpmkit::read_problem_file(problem_path);
  const pcpmkit::Algorithm algo = parse_algorithm(algo_name);

  double lambda;
  if (lambda_text == "auto") {
    lambda = auto_lambda(problem, algo, gamma, tau, sigma);
  } else {
    lambda = std::stod(lambda_text);
  }

  pcpmkit::SolverConfig cfg = [&] {
    switch (algo) {
      case pcpmkit::Algorithm::PCPM: return pcpmkit::SolverConfig::pcpm(lambda, opts);
      case pcpmkit::Algorithm::GPCPM1: return pcpmkit::SolverConfig::gpcpm1(lambda, gamma, opts);
      case pcpmkit::Algorithm::GPCPM2: return pcpmkit::SolverConfig::gpcpm2(lambda, gamma, opts);
      default:
        return pcpmkit::SolverConfig::gpcpm3(lambda, gamma, tau.value_or(lambda),
                                             sigma.value_or(lambda), opts);
    }
  }();

  const pcpmkit::RunReport report = pcpmkit::solve(problem, cfg);
  json out = pcpmkit::report_to_json(report);
  out["algorithm"] = algo_name;
  out["lambda"] = lambda;
  if (algo != pcpmkit::Algorithm::PCPM) out["gamma"] = gamma;
  if (algo == pcpmkit::Algorithm::GPCPM3) {
    out["tau"] = tau.value_or(lambda);
    out["sigma"] = sigma.value_or(lambda);
  }
  if (out_path.empty()) {
    std::cout << out.dump(2) << '\n';
  } else {
    write_text_file(out_path, out.dump(2) + "\n");
    std::cout << (report.converged ? "converged" : report.divergence_flag ? "diverged" : "stopped")
              << " after " << report.iterations << " iterations, max residual "
              << report.final_residuals.max_residual() << ", report written to " << out_path
              << '\n';
  }
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  return 0;
}

int run_curves(double gamma, const std::string& grid_text, const std::string& out_path) {
  std::vector<double> grid;
  if (grid_text.empty()) {
    grid = pcpmkit::log_grid(0.1, 100.0, 200);
  } else {
    grid = parse_grid(grid_text);
  }
  const pcpmkit::CurveTable table = pcpmkit::emit_stepsize_curves(grid, gamma);
  if (out_path.empty()) {
    table.write_csv(std::cout);
  } else {
    std::ostringstream buffer;
    table.write_csv(buffer);
    write_text_file(out_path, buffer.str());
    std::cout << "wrote " << table.rows.size() << " rows to " << out_path << '\n';
  }
  return 0;
}

int run_sweep(const std::string& problem_path, const std::string& algo_name, double gamma,
              const std::string& grid_text, bool absolute, pcpmkit::RunOptions opts,
              const std::string& out_path, int threads) {
  const pcpmkit::ProblemInstance problem = pcpmkit::read_problem_file(problem_path);
  const pcpmkit::Algorithm algo = parse_algorithm(algo_name);
  std::vector<double> grid = parse_grid(grid_text);
  if (!absolute) {  // grid entries are multipliers of the matching bound
    const double reference = auto_lambda(problem, algo, gamma, std::nullopt, std::nullopt) / 0.99;
    for (double& v : grid) v *= reference;
  }
  const pcpmkit::SweepResult result =
      pcpmkit::sweep_lambda(problem, algo, gamma, grid, opts, threads);
  if (out_path.empty()) {
    result.write_csv(std::cout);
  } else {
    std::ostringstream buffer;
    result.write_csv(buffer);
    write_text_file(out_path, buffer.str());
    std::cout << "wrote " << result.points.size() << " sweep points to " << out_path << '\n';
  }
  return 0;
}

int run_verify_equivalence(int n, int m, std::uint64_t seed, double lambda, int iters,
                           double threshold) {
  pcpmkit::GeneratorSpec spec;
  spec.kind = pcpmkit::GeneratorKind::RandomQuadSplit;
  spec.n = n;
  spec.m = m;
  spec.seed = seed;
  const pcpmkit::ProblemInstance problem = pcpmkit::generate_problem(spec);
  const pcpmkit::EquivalenceReport report =
      pcpmkit::check_pcpm_alm_equivalence(problem, lambda, iters);
  json j;
  j["n"] = n;
  j["m"] = m;
  j["seed"] = seed;
  j["lambda"] = lambda;
  j["iterations"] = report.iterations;
  j["max_deviation"] = report.max_deviation;
  j["threshold"] = threshold;
  j["pass"] = report.max_deviation <= threshold;
  std::cout << j.dump() << '\n';
  return report.max_deviation <= threshold ? 0 : 2;
}

int run_generate(const std::string& kind_name, int n, int m, int l, std::uint64_t seed, double mu,
                 double scale, const std::string& out_path) {
  pcpmkit::GeneratorSpec spec;
  spec.kind = parse_kind(kind_name);
  spec.n = n;
  spec.m = m;
  spec.l = l;
  spec.seed = seed;
  spec.mu_l1 = mu;
  spec.scale = scale;
  const pcpmkit::ProblemInstance problem = pcpmkit::generate_problem(spec);
  if (out_path.empty()) {
    std::cout << pcpmkit::problem_to_json(problem).dump(2) << '\n';
  } else {
    pcpmkit::write_problem_file(out_path, problem);
    std::cout << "wrote " << kind_name << " problem (n=" << n << ", m=" << m
              << (spec.kind == pcpmkit::GeneratorKind::GeneralTwoBlock ? ", l=" + std::to_string(l) : "")
              << ") to " << out_path << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pcpmkit: predictor-corrector proximal multiplier solvers and step-size tooling"};
  app.require_subcommand(1);

  // bounds
  auto* bounds = app.add_subcommand("bounds", "print all step-size bounds and ratios as JSON lines");
  double bounds_norm_a = 1.0, bounds_gamma = 1.0;
  bounds->add_option("--norm-a", bounds_norm_a, "spectral norm of A")->required();
  bounds->add_option("--gamma", bounds_gamma, "relaxation factor in (0,2)")->capture_default_str();

  // solve
  auto* solve = app.add_subcommand("solve", "run a solver on a problem file");
  std::string solve_problem, solve_algo = "pcpm", solve_lambda = "auto", solve_out;
  double solve_gamma = 1.0;
  std::optional<double> solve_tau, solve_sigma;
  pcpmkit::RunOptions solve_opts;
  solve->add_option("--problem", solve_problem, "problem JSON file")->required();
  solve->add_option("--algo", solve_algo, "pcpm|gpcpm1|gpcpm2|gpcpm3")->capture_default_str();
  solve->add_option("--lambda", solve_lambda, "proximal parameter, or 'auto' for 0.99*bound")
      ->capture_default_str();
  solve->add_option("--gamma", solve_gamma, "relaxation factor in (0,2)")->capture_default_str();
  solve->add_option("--tau", solve_tau, "primal x step (gpcpm3)");
  solve->add_option("--sigma", solve_sigma, "primal z step (gpcpm3)");
  solve->add_option("--tol", solve_opts.tol, "stopping tolerance on the max residual")
      ->capture_default_str();
  solve->add_option("--max-iter", solve_opts.max_iter, "iteration cap")->capture_default_str();
  solve->add_flag("--history", solve_opts.record_history, "record residual/objective traces");
  solve->add_option("--out", solve_out, "write the run report JSON here (default: stdout)");

  // curves
  auto* curves = app.add_subcommand("curves", "emit step-size bound curves as CSV");
  double curves_gamma = 1.0;
  std::string curves_grid, curves_out;
  curves->add_option("--gamma", curves_gamma, "relaxation factor in (0,2)")->capture_default_str();
  curves->add_option("--grid", curves_grid, "||A|| grid as lo:hi:count (default log 0.1:100:200)");
  curves->add_option("--out", curves_out, "CSV output path (default: stdout)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run a solver over a lambda grid, emit CSV verdicts");
  std::string sweep_problem, sweep_algo = "pcpm", sweep_grid = "0.5:1.3:41", sweep_out;
  double sweep_gamma = 1.0;
  bool sweep_absolute = false;
  int sweep_threads = env_threads();
  pcpmkit::RunOptions sweep_opts;
  sweep_opts.tol = 1e-6;
  sweep_opts.max_iter = 5000;
  sweep->add_option("--problem", sweep_problem, "problem JSON file")->required();
  sweep->add_option("--algo", sweep_algo, "pcpm|gpcpm1|gpcpm2|gpcpm3")->capture_default_str();
  sweep->add_option("--gamma", sweep_gamma, "relaxation factor in (0,2)")->capture_default_str();
  sweep->add_option("--grid", sweep_grid,
                    "lambda grid lo:hi:count, in multiples of the matching bound unless --absolute")
      ->capture_default_str();
  sweep->add_flag("--absolute", sweep_absolute, "grid values are raw lambda values");
  sweep->add_option("--tol", sweep_opts.tol, "per-run stopping tolerance")->capture_default_str();
  sweep->add_option("--max-iter", sweep_opts.max_iter, "per-run iteration cap")->capture_default_str();
  sweep->add_option("--threads", sweep_threads,
                    "parallel sweep workers (default PCPMKIT_THREADS or all cores)");
  sweep->add_option("--out", sweep_out, "CSV output path (default: stdout)");

  // verify-equivalence
  auto* verify = app.add_subcommand(
      "verify-equivalence",
      "lockstep PCPM vs proximal-ALM run on a random quadratic instance; exit 2 on breach");
  int verify_n = 10, verify_m = 8, verify_iters = 200;
  std::uint64_t verify_seed = 0;
  double verify_lambda = 0.3, verify_threshold = 1e-10;
  verify->add_option("--n", verify_n, "x dimension")->capture_default_str();
  verify->add_option("--m", verify_m, "constraint rows")->capture_default_str();
  verify->add_option("--seed", verify_seed, "instance seed")->capture_default_str();
  verify->add_option("--lambda", verify_lambda, "proximal parameter")->capture_default_str();
  verify->add_option("--iters", verify_iters, "lockstep iterations")->capture_default_str();
  verify->add_option("--threshold", verify_threshold, "max allowed per-iterate deviation")
      ->capture_default_str();

  // generate
  auto* generate = app.add_subcommand("generate", "write a reproducible benchmark problem");
  std::string gen_kind = "lasso", gen_out;
  int gen_n = 100, gen_m = 50, gen_l = 0;
  std::uint64_t gen_seed = 0;
  double gen_mu = 0.1, gen_scale = 1.0;
  generate->add_option("--kind", gen_kind, "lasso|random_quad_split|general_two_block")
      ->capture_default_str();
  generate->add_option("--n", gen_n, "x dimension")->capture_default_str();
  generate->add_option("--m", gen_m, "data rows (lasso) or constraint rows")->capture_default_str();
  generate->add_option("--l", gen_l, "z dimension (general_two_block)")->capture_default_str();
  generate->add_option("--seed", gen_seed, "instance seed")->capture_default_str();
  generate->add_option("--mu", gen_mu, "l1 weight (lasso)")->capture_default_str();
  generate->add_option("--scale", gen_scale, "data scale")->capture_default_str();
  generate->add_option("--out", gen_out, "problem JSON path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n' << "run with --help for usage" << '\n';
    return 1;
  }

  try {
    if (bounds->parsed()) return run_bounds(bounds_norm_a, bounds_gamma);
    if (solve->parsed())
      return run_solve(solve_problem, solve_algo, solve_lambda, solve_gamma, solve_tau, solve_sigma,
                       solve_opts, solve_out);
    if (curves->parsed()) return run_curves(curves_gamma, curves_grid, curves_out);
    if (sweep->parsed())
      return run_sweep(sweep_problem, sweep_algo, sweep_gamma, sweep_grid, sweep_absolute,
                       sweep_opts, sweep_out, sweep_threads);
    if (verify->parsed())
      return run_verify_equivalence(verify_n, verify_m, verify_seed, verify_lambda, verify_iters,
                                    verify_threshold);
    if (generate->parsed())
      return run_generate(gen_kind, gen_n, gen_m, gen_l, gen_seed, gen_mu, gen_scale, gen_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
