#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <string>

#include "pcpmkit/errors.hpp"

namespace pcpmkit {

struct SpectralNormResult {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;  // false: iteration budget exhausted, value is the last estimate
};

/// Largest singular value of A by power iteration on A^T A.
///
/// Stops when the eigenpair residual ||A^T A v - rho v|| <= tol * rho, which
/// bounds the eigenvalue error of rho directly. Start vector is random
/// positive with a fixed seed, so results are reproducible.
inline SpectralNormResult spectral_norm(const Eigen::MatrixXd& a, double tol = 1e-10,
                                        int max_iter = 5000) {
  if (a.size() == 0) throw DimensionError("spectral_norm: matrix is empty");
  if (tol <= 0.0) throw ParameterError("spectral_norm: tol must be positive");
  if (max_iter <= 0) throw ParameterError("spectral_norm: max_iter must be positive");

  std::mt19937_64 rng(0x5eed5eedULL);
  std::uniform_real_distribution<double> uni(0.5, 1.5);
  Eigen::VectorXd v(a.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = uni(rng);
  v.normalize();

  SpectralNormResult result;
  double rho = 0.0;
  for (int k = 1; k <= max_iter; ++k) {
    Eigen::VectorXd w = a.transpose() * (a * v);
    rho = v.dot(w);
    result.iterations = k;
    const double residual = (w - rho * v).norm();
    if (residual <= tol * rho) {
      result.value = std::sqrt(rho);
      result.converged = true;
      return result;
    }
    const double wn = w.norm();
    if (wn == 0.0) {  // v is exactly in the null space; only certain for A = 0
      result.value = 0.0;
      result.converged = a.isZero(0.0);
      return result;
    }
    v = w / wn;
  }
  result.value = std::sqrt(std::max(rho, 0.0));
  result.converged = false;
  return result;
}

namespace detail {
inline void require_norm_nonnegative(double norm_a, const char* where) {
  if (!(norm_a >= 0.0)) throw ParameterError(std::string(where) + ": norm must be nonnegative");
}
inline void require_gamma_open_0_2(double gamma, const char* where) {
  if (!(gamma > 0.0 && gamma < 2.0))
    throw ParameterError(std::string(where) + ": gamma = " + std::to_string(gamma) +
                         " outside (0, 2)");
}
}  // namespace detail

/// lambda <= 1 / (2 max(||A||, 1)); nonstrict.
inline double bound_original(double norm_a) {
  detail::require_norm_nonnegative(norm_a, "bound_original");
  return 1.0 / (2.0 * std::max(norm_a, 1.0));
}

/// lambda <= 1 / (sqrt(2) max(||A||, 1)); nonstrict.
inline double bound_shefi(double norm_a) {
  detail::require_norm_nonnegative(norm_a, "bound_shefi");
  return 1.0 / (std::sqrt(2.0) * std::max(norm_a, 1.0));
}

/// lambda < 1 / sqrt(||A||^2 + 1); strict.
inline double bound_he(double norm_a) {
  detail::require_norm_nonnegative(norm_a, "bound_he");
  return 1.0 / std::sqrt(norm_a * norm_a + 1.0);
}

/// lambda < 1 / sqrt(((2+gamma)/4) (||A||^2 + 1)); strict. Requires gamma in (0, 2).
inline double bound_new(double norm_a, double gamma) {
  detail::require_norm_nonnegative(norm_a, "bound_new");
  detail::require_gamma_open_0_2(gamma, "bound_new");
  return 1.0 / std::sqrt((2.0 + gamma) / 4.0 * (norm_a * norm_a + 1.0));
}

/// Two-block condition lambda*tau*||A^T A|| + lambda*sigma*||B^T B|| < 4/(2+gamma).
/// Strict: equality is rejected.
inline bool check_general_condition(double lambda, double tau, double sigma, double gamma,
                                    double norm_ata, double norm_btb) {
  if (!(lambda > 0.0) || !(tau > 0.0) || !(sigma > 0.0))
    throw ParameterError("check_general_condition: lambda, tau, sigma must be positive");
  detail::require_gamma_open_0_2(gamma, "check_general_condition");
  if (!(norm_ata >= 0.0) || !(norm_btb >= 0.0))
    throw ParameterError("check_general_condition: matrix norms must be nonnegative");
  return lambda * tau * norm_ata + lambda * sigma * norm_btb < 4.0 / (2.0 + gamma);
}

/// All four step-size bounds at one (||A||, gamma) point.
struct BoundReport {
  double norm_a = 0.0;
  double gamma = 1.0;
  double original = 0.0;  // nonstrict
  double shefi = 0.0;     // nonstrict
  double he = 0.0;        // strict
  double new_bound = 0.0;  // strict
};

inline BoundReport compute_bounds(double norm_a, double gamma) {
  BoundReport r;
  r.norm_a = norm_a;
  r.gamma = gamma;
  r.original = bound_original(norm_a);
  r.shefi = bound_shefi(norm_a);
  r.he = bound_he(norm_a);
  r.new_bound = bound_new(norm_a, gamma);
  return r;
}

}  // namespace pcpmkit
