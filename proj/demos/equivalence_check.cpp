// Runs the solver and the reference proximal ALM in lockstep on a random
// quadratic instance and prints how far the iterate sequences drift apart.

#include <cstdio>

#include "pcpmkit/pcpmkit.hpp"

int main() {
  using namespace pcpmkit;

  GeneratorSpec spec;
  spec.kind = GeneratorKind::RandomQuadSplit;
  spec.n = 20;
  spec.m = 15;
  spec.seed = 7;
  const ProblemInstance problem = generate_problem(spec);

  const double norm_a = spectral_norm(problem.A()).value;
  const double lambda = 0.9 * bound_new(norm_a, 1.0);
  const ProximalMatrix pm = build_pcpm_matrix(problem.A(), lambda);
  std::printf("proximal matrix eigenvalue range: [%.6f, %.6f]\n", pm.eig_min, pm.eig_max);
  std::printf("block-assembly vs identity-form difference: %.3e\n",
              verify_linearized_identity(problem.A(), lambda));

  const EquivalenceReport report = check_pcpm_alm_equivalence(problem, lambda, 200);
  std::printf("max per-iterate deviation over %d iterations at lambda=%.4f: %.3e\n",
              report.iterations, lambda, report.max_deviation);

  const IdpAdmissibility idp = check_idp_admissibility(problem.A(), lambda, 1.0);
  if (idp.admissible) {
    std::printf("indefinite-proximal witness: tau3=%.6f in (%.6f, %.6f), min eig(D)=%.3e\n",
                idp.tau3, idp.tau_lo, idp.tau_hi, idp.d_min_eigenvalue);
  } else {
    std::printf("no indefinite-proximal witness at lambda=%.4f (bound %.4f)\n", lambda, idp.bound);
  }
  return report.max_deviation <= 1e-10 ? 0 : 1;
}
