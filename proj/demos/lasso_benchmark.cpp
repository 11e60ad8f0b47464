// Generates a lasso instance, picks the step size from the relaxed bound and
// compares the solver family on it.

#include <cstdio>

#include "pcpmkit/pcpmkit.hpp"

int main() {
  using namespace pcpmkit;

  GeneratorSpec spec;
  spec.kind = GeneratorKind::Lasso;
  spec.n = 100;
  spec.m = 50;
  spec.seed = 42;
  spec.mu_l1 = 0.1;
  const ProblemInstance problem = generate_problem(spec);

  const double norm_a = spectral_norm(problem.A()).value;
  std::printf("lasso n=%d m=%d, ||A|| = %.4f\n", spec.n, spec.m, norm_a);
  std::printf("bounds: original %.5f | shefi %.5f | he %.5f | new(gamma=1) %.5f\n\n",
              bound_original(norm_a), bound_shefi(norm_a), bound_he(norm_a),
              bound_new(norm_a, 1.0));

  RunOptions opts;
  opts.tol = 1e-8;
  opts.max_iter = 20000;

  struct Row {
    const char* label;
    SolverConfig cfg;
  };
  const double lam1 = 0.99 * bound_new(norm_a, 1.0);
  const double lam16 = 0.99 * bound_new(norm_a, 1.6);
  const double lam_he = 0.99 * bound_he(norm_a);  // gpcpm2's relaxation needs the PD metric
  const Row rows[] = {
      {"pcpm               ", SolverConfig::pcpm(lam1, opts)},
      {"gpcpm1 (gamma=1.6) ", SolverConfig::gpcpm1(lam16, 1.6, opts)},
      {"gpcpm2 (gamma=1.5) ", SolverConfig::gpcpm2(lam_he, 1.5, opts)},
  };
  std::printf("%-20s %10s %8s %12s %12s\n", "algorithm", "lambda", "iters", "primal", "objective");
  for (const Row& row : rows) {
    const RunReport report = solve(problem, row.cfg);
    std::printf("%-20s %10.5f %8d %12.3e %12.6f\n", row.label, row.cfg.lambda(),
                report.iterations, report.final_residuals.primal,
                report.final_residuals.objective);
  }
  return 0;
}
