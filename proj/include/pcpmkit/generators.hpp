#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "pcpmkit/errors.hpp"
#include "pcpmkit/problem.hpp"

namespace pcpmkit {

enum class GeneratorKind { Lasso, RandomQuadSplit, GeneralTwoBlock };

inline const char* to_string(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::Lasso: return "lasso";
    case GeneratorKind::RandomQuadSplit: return "random_quad_split";
    case GeneratorKind::GeneralTwoBlock: return "general_two_block";
  }
  return "?";
}

/// Reproducible benchmark-problem recipe: one seed, one instance.
struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::Lasso;
  int n = 0;          // x dimension
  int m = 0;          // lasso: rows of the data matrix C; otherwise rows of A
  int l = 0;          // general form only: z dimension
  double scale = 1.0;
  std::uint64_t seed = 0;
  double mu_l1 = 0.1;  // lasso regularization weight
};

namespace detail {
inline Eigen::MatrixXd gaussian_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                                       double scale) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = scale * normal(rng);
  return m;
}

inline Eigen::VectorXd gaussian_vector(std::mt19937_64& rng, Eigen::Index size, double scale) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) v(i) = scale * normal(rng);
  return v;
}

// strongly convex quadratic 0.5||C u - d||^2 with C taller than wide
inline ProxFunction random_quad(std::mt19937_64& rng, Eigen::Index dim, double scale) {
  const Eigen::Index rows = dim + 5;
  const Eigen::MatrixXd c = gaussian_matrix(rng, rows, dim, scale / std::sqrt(double(dim)));
  const Eigen::VectorXd d = gaussian_vector(rng, rows, 1.0);
  return ProxFunction::quad_affine(c, d);
}
}  // namespace detail

/// Deterministic: a spec maps to exactly one instance (fixed draw order from
/// one seeded engine).
inline ProblemInstance generate_problem(const GeneratorSpec& spec) {
  if (spec.n <= 0 || spec.m <= 0)
    throw ParameterError("generate_problem: dimensions n, m must be positive");
  if (!(spec.scale > 0.0)) throw ParameterError("generate_problem: scale must be positive");
  std::mt19937_64 rng(spec.seed);

  switch (spec.kind) {
    case GeneratorKind::Lasso: {
      // min 0.5||C x - d||^2 + mu ||z||_1  s.t.  x = z
      if (!(spec.mu_l1 >= 0.0)) throw ParameterError("generate_problem: mu_l1 must be nonnegative");
      const Eigen::MatrixXd c =
          detail::gaussian_matrix(rng, spec.m, spec.n, spec.scale / std::sqrt(double(spec.m)));
      std::vector<Eigen::Index> idx(static_cast<std::size_t>(spec.n));
      std::iota(idx.begin(), idx.end(), 0);
      std::shuffle(idx.begin(), idx.end(), rng);
      const Eigen::Index nnz = std::max<Eigen::Index>(1, spec.n / 10);
      Eigen::VectorXd x_ref = Eigen::VectorXd::Zero(spec.n);
      std::uniform_real_distribution<double> sign(0.0, 1.0);
      for (Eigen::Index i = 0; i < nnz; ++i) x_ref(idx[static_cast<std::size_t>(i)]) = sign(rng) < 0.5 ? -1.0 : 1.0;
      const Eigen::VectorXd d = c * x_ref + detail::gaussian_vector(rng, spec.m, 0.01);
      return ProblemInstance(ProxFunction::quad_affine(c, d), ProxFunction::l1(spec.mu_l1),
                             Eigen::MatrixXd::Identity(spec.n, spec.n));
    }
    case GeneratorKind::RandomQuadSplit: {
      // both blocks quadratic, constraint A x = z with a random A
      const double norm_scale = spec.scale / std::sqrt(double(std::max(spec.m, spec.n)));
      const Eigen::MatrixXd a = detail::gaussian_matrix(rng, spec.m, spec.n, norm_scale);
      ProxFunction f = detail::random_quad(rng, spec.n, spec.scale);
      ProxFunction g = detail::random_quad(rng, spec.m, spec.scale);
      return ProblemInstance(std::move(f), std::move(g), a);
    }
    case GeneratorKind::GeneralTwoBlock: {
      // A x + B z = b with b = A x_ref + B z_ref, so the instance is feasible
      if (spec.l <= 0) throw ParameterError("generate_problem: l must be positive for general_two_block");
      const Eigen::MatrixXd a = detail::gaussian_matrix(
          rng, spec.m, spec.n, spec.scale / std::sqrt(double(std::max(spec.m, spec.n))));
      const Eigen::MatrixXd b_mat = detail::gaussian_matrix(
          rng, spec.m, spec.l, spec.scale / std::sqrt(double(std::max(spec.m, spec.l))));
      ProxFunction f = detail::random_quad(rng, spec.n, spec.scale);
      ProxFunction g = detail::random_quad(rng, spec.l, spec.scale);
      const Eigen::VectorXd x_ref = detail::gaussian_vector(rng, spec.n, 1.0);
      const Eigen::VectorXd z_ref = detail::gaussian_vector(rng, spec.l, 1.0);
      Eigen::VectorXd b_rhs = a * x_ref + b_mat * z_ref;
      return ProblemInstance(std::move(f), std::move(g), a, b_mat, std::move(b_rhs));
    }
  }
  throw ParameterError("generate_problem: unknown kind");
}

}  // namespace pcpmkit
