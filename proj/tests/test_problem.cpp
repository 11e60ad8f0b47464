#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "pcpmkit/problem.hpp"
#include "pcpmkit/stepsize.hpp"
#include "support/oracles.hpp"

using Catch::Matchers::WithinAbs;
using namespace pcpmkit;

TEST_CASE("block reformulation of a scalar problem", "[problem]") {
  Eigen::MatrixXd a(1, 1);
  a << 1.0;
  const BlockReformulation r = build_reformulation(a);
  REQUIRE(r.theta_dim == 2);
  REQUIRE(r.M.rows() == 1);
  REQUIRE(r.M.cols() == 2);
  REQUIRE(r.M(0, 0) == 1.0);
  REQUIRE(r.M(0, 1) == -1.0);
}

TEST_CASE("block reformulation layout for a rectangular A", "[problem]") {
  std::mt19937_64 rng(41);
  const Eigen::MatrixXd a = oracles::random_matrix(rng, 2, 3);
  const BlockReformulation r = build_reformulation(a);
  REQUIRE(r.M.rows() == 2);
  REQUIRE(r.M.cols() == 5);
  REQUIRE((r.M.leftCols(3) - a).norm() == 0.0);
  REQUIRE((r.M.rightCols(2) + Eigen::MatrixXd::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("block reformulation of a zero A has unit norm", "[problem]") {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 2);
  const BlockReformulation r = build_reformulation(a);
  // M^T M = diag(0_n, I_m), checked against the dense eigensolver
  const Eigen::MatrixXd gram = r.M.transpose() * r.M;
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(5, 5);
  expected.bottomRightCorner(3, 3) = Eigen::MatrixXd::Identity(3, 3);
  REQUIRE((gram - expected).norm() == 0.0);
  const Eigen::VectorXd ev = oracles::sym_eigenvalues(gram);
  REQUIRE_THAT(ev(ev.size() - 1), WithinAbs(1.0, 1e-14));
  REQUIRE_THAT(spectral_norm(r.M).value, WithinAbs(1.0, 1e-10));
}

TEST_CASE("M applied to stacked (x; z) equals A x - z", "[problem]") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 7);
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng() % 7);
    const Eigen::MatrixXd a = oracles::random_matrix(rng, m, n);
    const BlockReformulation r = build_reformulation(a);
    const Eigen::VectorXd x = oracles::random_vector(rng, n);
    const Eigen::VectorXd z = oracles::random_vector(rng, m);
    Eigen::VectorXd u(n + m);
    u << x, z;
    REQUIRE(((r.M * u) - (a * x - z)).lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("reformulation rejects general-form problems", "[problem]") {
  std::mt19937_64 rng(43);
  const Eigen::MatrixXd a = oracles::random_matrix(rng, 2, 2);
  const Eigen::MatrixXd b = oracles::random_matrix(rng, 2, 2);
  ProblemInstance general(ProxFunction::zero(), ProxFunction::zero(), a, b,
                          Eigen::VectorXd::Zero(2));
  REQUIRE_THROWS_AS(build_reformulation(general), FormError);
  REQUIRE_THROWS_AS(build_reformulation(Eigen::MatrixXd()), DimensionError);
}

TEST_CASE("problem construction validates dimensions", "[problem]") {
  std::mt19937_64 rng(44);
  const Eigen::MatrixXd a = oracles::random_matrix(rng, 3, 2);

  SECTION("B row mismatch") {
    const Eigen::MatrixXd b = oracles::random_matrix(rng, 2, 2);
    REQUIRE_THROWS_MATCHES(
        ProblemInstance(ProxFunction::zero(), ProxFunction::zero(), a, b, Eigen::VectorXd::Zero(3)),
        DimensionError, Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("B has 2 rows")));
  }
  SECTION("b length mismatch") {
    const Eigen::MatrixXd b = oracles::random_matrix(rng, 3, 2);
    REQUIRE_THROWS_MATCHES(
        ProblemInstance(ProxFunction::zero(), ProxFunction::zero(), a, b, Eigen::VectorXd::Zero(4)),
        DimensionError, Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("b has length 4")));
  }
  SECTION("f dimension mismatch") {
    const ProxFunction f = ProxFunction::box(Eigen::VectorXd::Zero(5), Eigen::VectorXd::Ones(5));
    REQUIRE_THROWS_AS(ProblemInstance(f, ProxFunction::zero(), a), DimensionError);
  }
  SECTION("g dimension mismatch") {
    const ProxFunction g = ProxFunction::box(Eigen::VectorXd::Zero(5), Eigen::VectorXd::Ones(5));
    REQUIRE_THROWS_AS(ProblemInstance(ProxFunction::zero(), g, a), DimensionError);
  }
  SECTION("B/b access on splitting form") {
    ProblemInstance p(ProxFunction::zero(), ProxFunction::zero(), a);
    REQUIRE_THROWS_AS(p.B(), FormError);
    REQUIRE_THROWS_AS(p.b(), FormError);
    REQUIRE(p.n() == 2);
    REQUIRE(p.m() == 3);
    REQUIRE(p.z_dim() == 3);
  }
}

TEST_CASE("residuals vanish at a trivial saddle point", "[problem]") {
  std::mt19937_64 rng(45);
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(4, 4);
  ProblemInstance p(ProxFunction::zero(), ProxFunction::zero(), a);
  const Eigen::VectorXd x = oracles::random_vector(rng, 4);
  const SaddlePointResidual r = residuals(p, x, x, Eigen::VectorXd::Zero(4));
  REQUIRE(r.primal == 0.0);
  REQUIRE(r.dual_x == 0.0);
  REQUIRE(r.dual_z == 0.0);
  REQUIRE(r.objective == 0.0);
  REQUIRE(r.max_residual() == 0.0);
}

TEST_CASE("primal residual is the constraint violation norm", "[problem]") {
  Eigen::MatrixXd a(1, 1);
  a << 1.0;
  ProblemInstance p(ProxFunction::zero(), ProxFunction::zero(), a);
  Eigen::VectorXd one(1), zero(1);
  one << 1.0;
  zero << 0.0;
  const SaddlePointResidual r = residuals(p, one, zero, zero);
  REQUIRE(r.primal == 1.0);
}

TEST_CASE("residual computation checks dimensions", "[problem]") {
  std::mt19937_64 rng(46);
  const Eigen::MatrixXd a = oracles::random_matrix(rng, 3, 2);
  ProblemInstance p(ProxFunction::zero(), ProxFunction::zero(), a);
  REQUIRE_THROWS_AS(residuals(p, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3),
                              Eigen::VectorXd::Zero(3)),
                    DimensionError);
  REQUIRE_THROWS_AS(residuals(p, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2),
                              Eigen::VectorXd::Zero(3)),
                    DimensionError);
  REQUIRE_THROWS_AS(residuals(p, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(3),
                              Eigen::VectorXd::Zero(2)),
                    DimensionError);
}

TEST_CASE("general-form constraint violation", "[problem]") {
  std::mt19937_64 rng(47);
  const Eigen::MatrixXd a = oracles::random_matrix(rng, 3, 2);
  const Eigen::MatrixXd b = oracles::random_matrix(rng, 3, 4);
  const Eigen::VectorXd x = oracles::random_vector(rng, 2);
  const Eigen::VectorXd z = oracles::random_vector(rng, 4);
  const Eigen::VectorXd rhs = a * x + b * z;  // feasible by construction
  ProblemInstance p(ProxFunction::zero(), ProxFunction::zero(), a, b, rhs);
  REQUIRE(constraint_violation(p, x, z).norm() == 0.0);
  const SaddlePointResidual r = residuals(p, x, z, Eigen::VectorXd::Zero(3));
  REQUIRE(r.primal == 0.0);
  REQUIRE(r.dual_x == 0.0);
  REQUIRE(r.dual_z == 0.0);
}
