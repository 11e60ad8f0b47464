#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "pcpmkit/stepsize.hpp"
#include "support/oracles.hpp"

using Catch::Matchers::WithinAbs;
using namespace pcpmkit;

TEST_CASE("spectral norm of a diagonal matrix", "[stepsize]") {
  Eigen::MatrixXd a = Eigen::Vector2d(3.0, 1.0).asDiagonal();
  const auto r = spectral_norm(a);
  REQUIRE(r.converged);
  REQUIRE_THAT(r.value, WithinAbs(3.0, 1e-10));
}

TEST_CASE("spectral norm of the (1,-1) row is sqrt(2)", "[stepsize]") {
  Eigen::MatrixXd a(1, 2);
  a << 1.0, -1.0;
  const auto r = spectral_norm(a);
  REQUIRE(r.converged);
  REQUIRE_THAT(r.value, WithinAbs(std::sqrt(2.0), 1e-12));
}

TEST_CASE("spectral norm matches the dense eigensolver oracle", "[stepsize]") {
  std::mt19937_64 rng(31);
  Eigen::MatrixXd a = oracles::random_matrix(rng, 8, 6);
  auto r = spectral_norm(a);
  REQUIRE(r.converged);
  REQUIRE_THAT(r.value, Catch::Matchers::WithinRel(oracles::spectral_norm(a), 1e-8));

  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index rows = 1 + static_cast<Eigen::Index>(rng() % 30);
    const Eigen::Index cols = 1 + static_cast<Eigen::Index>(rng() % 30);
    a = oracles::random_matrix(rng, rows, cols);
    r = spectral_norm(a);
    REQUIRE(r.converged);
    REQUIRE_THAT(r.value, Catch::Matchers::WithinRel(oracles::spectral_norm(a), 1e-8));
  }
}

TEST_CASE("spectral norm edge cases", "[stepsize]") {
  const auto zero = spectral_norm(Eigen::MatrixXd::Zero(4, 3));
  REQUIRE(zero.converged);
  REQUIRE(zero.value == 0.0);
  REQUIRE_THROWS_AS(spectral_norm(Eigen::MatrixXd()), DimensionError);
  REQUIRE_THROWS_AS(spectral_norm(Eigen::MatrixXd::Ones(2, 2), 0.0), ParameterError);
  REQUIRE_THROWS_AS(spectral_norm(Eigen::MatrixXd::Ones(2, 2), 1e-10, 0), ParameterError);
}

TEST_CASE("bound values at reference points", "[stepsize]") {
  REQUIRE_THAT(bound_original(1.0), WithinAbs(0.5, 1e-15));
  REQUIRE_THAT(bound_original(0.5), WithinAbs(0.5, 1e-15));  // max clamps to 1
  REQUIRE_THAT(bound_original(2.0), WithinAbs(0.25, 1e-15));

  REQUIRE_THAT(bound_shefi(1.0), WithinAbs(0.70711, 5e-6));
  REQUIRE_THAT(bound_shefi(0.0), WithinAbs(0.70711, 5e-6));
  REQUIRE_THAT(bound_shefi(2.0), WithinAbs(0.35355, 5e-6));

  REQUIRE_THAT(bound_he(1.0), WithinAbs(0.70711, 5e-6));
  REQUIRE_THAT(bound_he(0.0), WithinAbs(1.0, 1e-15));
  REQUIRE_THAT(bound_he(2.0), WithinAbs(0.44721, 5e-6));

  REQUIRE_THAT(bound_new(1.0, 1.0), WithinAbs(0.81650, 5e-6));
  // gamma = 2 itself is excluded; the limit value is 1 at ||A|| = 0
  REQUIRE_THAT(bound_new(0.0, 2.0 - 1e-12), WithinAbs(1.0, 1e-9));
  REQUIRE_THROWS_AS(bound_new(0.0, 2.0), ParameterError);
  REQUIRE_THROWS_AS(bound_new(1.0, 0.0), ParameterError);
  REQUIRE_THROWS_AS(bound_original(-1.0), ParameterError);
}

TEST_CASE("bound ordering over a log grid", "[stepsize]") {
  const double gammas[] = {0.5, 1.0, 1.5, 1.99};
  for (double exp10 = -2.0; exp10 <= 3.0; exp10 += 0.1) {
    const double norm_a = std::pow(10.0, exp10);
    const double orig = bound_original(norm_a);
    const double shefi = bound_shefi(norm_a);
    const double he = bound_he(norm_a);
    REQUIRE(orig <= shefi);
    REQUIRE(shefi <= he + 1e-15);
    for (const double gamma : gammas) {
      const double relaxed = bound_new(norm_a, gamma);
      REQUIRE(he < relaxed);
    }
    // gamma -> 2 from below: the new bound approaches he from above
    const double nearly_two = bound_new(norm_a, 2.0 - 1e-9);
    REQUIRE(nearly_two > he);
    REQUIRE(nearly_two - he <= 1e-8 * he);
  }
}

TEST_CASE("constant-ratio identity new/he = sqrt(4/(2+gamma))", "[stepsize]") {
  for (const double gamma : {0.5, 1.0, 1.5}) {
    const double expected = std::sqrt(4.0 / (2.0 + gamma));
    for (double exp10 = -2.0; exp10 <= 3.0; exp10 += 0.05) {
      const double norm_a = std::pow(10.0, exp10);
      REQUIRE_THAT(bound_new(norm_a, gamma) / bound_he(norm_a), WithinAbs(expected, 1e-12));
    }
    if (gamma == 1.0) REQUIRE_THAT(expected, WithinAbs(1.15470, 5e-6));
  }
}

TEST_CASE("two-block condition arithmetic and strictness", "[stepsize]") {
  // 0.5*0.5*1 + 0.5*0.5*1 = 0.5 < 4/3
  REQUIRE(check_general_condition(0.5, 0.5, 0.5, 1.0, 1.0, 1.0));
  // boundary held exactly: lambda = (4/3)/2 makes the sum equal 4/(2+gamma)
  const double boundary_lambda = (4.0 / 3.0) / 2.0;
  REQUIRE_FALSE(check_general_condition(boundary_lambda, 1.0, 1.0, 1.0, 1.0, 1.0));
  REQUIRE_THROWS_AS(check_general_condition(0.0, 1.0, 1.0, 1.0, 1.0, 1.0), ParameterError);
  REQUIRE_THROWS_AS(check_general_condition(1.0, 1.0, 1.0, 2.0, 1.0, 1.0), ParameterError);
  REQUIRE_THROWS_AS(check_general_condition(1.0, 1.0, 1.0, 1.0, -1.0, 1.0), ParameterError);
}

TEST_CASE("two-block condition reduces to the relaxed bound when B = -I", "[stepsize]") {
  // lambda = tau = sigma and ||B^T B|| = 1: condition <=> lambda < bound_new(||A||, gamma)
  for (const double gamma : {0.5, 1.0, 1.5}) {
    for (double norm_a = 0.25; norm_a <= 4.0; norm_a += 0.25) {
      const double bound = bound_new(norm_a, gamma);
      for (const double frac : {0.5, 0.9, 0.999, 1.001, 1.5}) {
        const double lambda = frac * bound;
        const bool reduced = lambda < bound;
        REQUIRE(check_general_condition(lambda, lambda, lambda, gamma, norm_a * norm_a, 1.0) ==
                reduced);
      }
    }
  }
}

TEST_CASE("compute_bounds packs all four bounds", "[stepsize]") {
  const BoundReport r = compute_bounds(1.0, 1.0);
  REQUIRE_THAT(r.original, WithinAbs(0.5, 1e-15));
  REQUIRE_THAT(r.shefi, WithinAbs(0.70711, 5e-6));
  REQUIRE_THAT(r.he, WithinAbs(0.70711, 5e-6));
  REQUIRE_THAT(r.new_bound, WithinAbs(0.81650, 5e-6));
  REQUIRE(r.norm_a == 1.0);
  REQUIRE(r.gamma == 1.0);
}
