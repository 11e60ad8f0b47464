#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "pcpmkit/diagnostics.hpp"
#include "pcpmkit/generators.hpp"
#include "support/oracles.hpp"

using Catch::Matchers::WithinAbs;
using namespace pcpmkit;

TEST_CASE("curve table values are bit-identical to direct bound evaluations", "[diagnostics]") {
  const std::vector<double> grid = log_grid(0.1, 100.0, 50);
  const CurveTable t = emit_stepsize_curves(grid, 1.0);
  REQUIRE(t.rows.size() == 50);
  const auto norm_a = t.column("norm_a");
  const auto original = t.column("original");
  const auto he = t.column("he");
  const auto relaxed = t.column("new");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    REQUIRE(norm_a[i] == grid[i]);
    REQUIRE(original[i] == bound_original(grid[i]));
    REQUIRE(he[i] == bound_he(grid[i]));
    REQUIRE(relaxed[i] == bound_new(grid[i], 1.0));
  }
}

TEST_CASE("ratio columns are columnwise quotients", "[diagnostics]") {
  const CurveTable t = emit_stepsize_curves(log_grid(0.1, 100.0, 30), 1.0);
  const auto original = t.column("original");
  const auto he = t.column("he");
  const auto relaxed = t.column("new");
  const auto he_ratio = t.column("he_over_original");
  const auto new_ratio = t.column("new_over_original");
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    REQUIRE_THAT(he_ratio[i], WithinAbs(he[i] / original[i], 1e-12));
    REQUIRE_THAT(new_ratio[i], WithinAbs(relaxed[i] / original[i], 1e-12));
    // the derived new/he ratio is the constant sqrt(4/3) at gamma = 1
    REQUIRE_THAT(relaxed[i] / he[i], WithinAbs(std::sqrt(4.0 / 3.0), 1e-12));
  }
}

TEST_CASE("single-point grid and reference values", "[diagnostics]") {
  const CurveTable t = emit_stepsize_curves({1.0}, 1.0);
  REQUIRE(t.rows.size() == 1);
  REQUIRE_THAT(t.rows[0][1], WithinAbs(0.5, 1e-15));                  // original
  REQUIRE_THAT(t.rows[0][2], WithinAbs(0.70711, 5e-6));               // he
  REQUIRE_THAT(t.rows[0][3], WithinAbs(0.81650, 5e-6));               // new
  REQUIRE_THAT(t.rows[0][4], WithinAbs(0.70711 / 0.5, 1e-4));         // he/original
  REQUIRE_THAT(t.rows[0][3] / t.rows[0][2], WithinAbs(1.15470, 5e-6));  // new/he
}

TEST_CASE("curve grid validation", "[diagnostics]") {
  REQUIRE_THROWS_AS(emit_stepsize_curves({}, 1.0), ParameterError);
  REQUIRE_THROWS_AS(emit_stepsize_curves({0.0, 1.0}, 1.0), ParameterError);
  REQUIRE_THROWS_AS(emit_stepsize_curves({1.0, 0.5}, 1.0), ParameterError);
  REQUIRE_THROWS_AS(emit_stepsize_curves({1.0}, 2.0), ParameterError);
  REQUIRE_THROWS_AS(log_grid(1.0, 0.5, 10), ParameterError);
  const CurveTable t = emit_stepsize_curves({1.0}, 1.0);
  REQUIRE_THROWS_AS(t.column("nope"), ParameterError);
}

TEST_CASE("csv writer emits a header and one row per point", "[diagnostics]") {
  const CurveTable t = emit_stepsize_curves({0.5, 1.0, 2.0}, 1.0);
  std::ostringstream out;
  t.write_csv(out);
  std::istringstream in(out.str());
  std::string line;
  REQUIRE(std::getline(in, line));
  REQUIRE(line == "norm_a,original,he,new,he_over_original,new_over_original");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  REQUIRE(rows == 3);
}

TEST_CASE("lambda sweep on lasso converges below the bound", "[diagnostics]") {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::Lasso;
  spec.n = 30;
  spec.m = 15;
  spec.seed = 21;
  const ProblemInstance p = generate_problem(spec);
  const double bound = bound_new(spectral_norm(p.A()).value, 1.0);
  std::vector<double> grid;
  for (double f = 0.5; f <= 1.301; f += 0.1) grid.push_back(f * bound);
  RunOptions opts;
  opts.tol = 1e-6;
  opts.max_iter = 5000;
  const SweepResult result = sweep_lambda(p, Algorithm::PCPM, 1.0, grid, opts);
  REQUIRE(result.points.size() == grid.size());
  REQUIRE(result.bounds.has_value());
  REQUIRE_THAT(result.bounds->new_bound, WithinAbs(bound, 1e-14));
  for (const auto& pt : result.points) {
    REQUIRE(pt.error.empty());
    if (pt.lambda <= 0.99 * bound) REQUIRE(pt.verdict == SweepVerdict::Converged);
  }
}

TEST_CASE("sweep results are order-independent across thread counts", "[diagnostics]") {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::Lasso;
  spec.n = 16;
  spec.m = 10;
  spec.seed = 22;
  const ProblemInstance p = generate_problem(spec);
  std::vector<double> grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  RunOptions opts;
  opts.tol = 1e-6;
  opts.max_iter = 3000;
  const SweepResult serial = sweep_lambda(p, Algorithm::PCPM, 1.0, grid, opts, 1);
  const SweepResult parallel = sweep_lambda(p, Algorithm::PCPM, 1.0, grid, opts, 4);
  REQUIRE(serial.points.size() == parallel.points.size());
  for (std::size_t i = 0; i < serial.points.size(); ++i) {
    REQUIRE(serial.points[i].lambda == parallel.points[i].lambda);
    REQUIRE(serial.points[i].verdict == parallel.points[i].verdict);
    REQUIRE(serial.points[i].report.iterations == parallel.points[i].report.iterations);
    REQUIRE(serial.points[i].report.final_residuals.primal ==
            parallel.points[i].report.final_residuals.primal);
  }
}

TEST_CASE("trivial free problem converges across the whole (0,2) grid", "[diagnostics]") {
  // f = g = 0, A = I: the zero start is already feasible at every lambda
  ProblemInstance p(ProxFunction::zero(), ProxFunction::zero(), Eigen::MatrixXd::Identity(2, 2));
  std::vector<double> grid;
  for (double l = 0.1; l < 2.0; l += 0.2) grid.push_back(l);
  RunOptions opts;
  opts.tol = 1e-10;
  opts.max_iter = 100;
  const SweepResult result = sweep_lambda(p, Algorithm::PCPM, 1.0, grid, opts);
  for (const auto& pt : result.points) {
    REQUIRE(pt.verdict == SweepVerdict::Converged);
    REQUIRE(pt.report.final_residuals.primal <= 1e-10);
  }
}

TEST_CASE("grids entirely below the original bound always converge", "[diagnostics]") {
  std::mt19937_64 rng(71);
  const ProblemInstance p = oracles::random_quadratic_instance(rng, 8, 6);
  const double original = bound_original(spectral_norm(p.A()).value);
  std::vector<double> grid = {0.25 * original, 0.5 * original, 0.75 * original, original};
  RunOptions opts;
  opts.tol = 1e-6;
  opts.max_iter = 20000;
  const SweepResult result = sweep_lambda(p, Algorithm::GPCPM1, 1.0, grid, opts);
  for (const auto& pt : result.points) REQUIRE(pt.verdict == SweepVerdict::Converged);
}

TEST_CASE("general-form sweep carries the two-block bound", "[diagnostics]") {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::GeneralTwoBlock;
  spec.n = 10;
  spec.m = 8;
  spec.l = 5;
  spec.seed = 23;
  const ProblemInstance p = generate_problem(spec);
  const double na = spectral_norm(p.A()).value;
  const double nb = spectral_norm(p.B()).value;
  const double expected = std::sqrt(4.0 / (3.0 * (na * na + nb * nb)));
  std::vector<double> grid = {0.5 * expected, 0.9 * expected};
  RunOptions opts;
  opts.tol = 1e-6;
  opts.max_iter = 20000;
  const SweepResult result = sweep_lambda(p, Algorithm::GPCPM3, 1.0, grid, opts);
  REQUIRE(result.general_bound.has_value());
  REQUIRE_THAT(*result.general_bound, WithinAbs(expected, 1e-12));
  for (const auto& pt : result.points) REQUIRE(pt.verdict == SweepVerdict::Converged);

  std::ostringstream out;
  result.write_csv(out);
  REQUIRE(out.str().find("bound_general") != std::string::npos);
}

TEST_CASE("sweep validates its inputs", "[diagnostics]") {
  ProblemInstance p(ProxFunction::zero(), ProxFunction::zero(), Eigen::MatrixXd::Identity(2, 2));
  RunOptions opts;
  REQUIRE_THROWS_AS(sweep_lambda(p, Algorithm::PCPM, 1.0, {}, opts), ParameterError);
  REQUIRE_THROWS_AS(sweep_lambda(p, Algorithm::PCPM, 1.0, {0.2, 0.1}, opts), ParameterError);
  REQUIRE_THROWS_AS(sweep_lambda(p, Algorithm::PCPM, 1.5, {0.1, 0.2}, opts), ParameterError);
}
