#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "pcpmkit/errors.hpp"

namespace pcpmkit {

struct SymmetricEigenResult {
  Eigen::VectorXd eigenvalues;  // ascending
  int sweeps = 0;
  bool converged = false;

  double min() const { return eigenvalues(0); }
  double max() const { return eigenvalues(eigenvalues.size() - 1); }
};

/// Eigenvalues of a dense symmetric matrix by the cyclic (row-wise) Jacobi
/// method. Deterministic: fixed sweep order, no pivot search. Intended for
/// desk-scale matrices; cost is O(sweeps * n^3).
///
/// Converged when the off-diagonal Frobenius norm falls below
/// tol * ||S||_F. A non-converged result still carries the current
/// diagonal, flagged.
inline SymmetricEigenResult jacobi_eigenvalues(const Eigen::MatrixXd& S,
                                               double tol = 1e-14,
                                               int max_sweeps = 64) {
  if (S.size() == 0) throw DimensionError("jacobi_eigenvalues: matrix is empty");
  if (S.rows() != S.cols()) {
    throw DimensionError("jacobi_eigenvalues: matrix is " + std::to_string(S.rows()) + "x" +
                         std::to_string(S.cols()) + ", expected square");
  }
  if (tol <= 0.0) throw ParameterError("jacobi_eigenvalues: tol must be positive");

  const Eigen::Index n = S.rows();
  // work on the symmetric part; inputs are symmetric up to roundoff
  Eigen::MatrixXd w = 0.5 * (S + S.transpose());

  SymmetricEigenResult result;
  if (n == 1) {
    result.eigenvalues = w.diagonal();
    result.converged = true;
    return result;
  }

  const double frob = std::max(w.norm(), 1e-300);
  const auto off_norm = [&]() {
    double acc = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) acc += 2.0 * w(p, q) * w(p, q);
    return std::sqrt(acc);
  };

  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    if (off_norm() <= tol * frob) {
      result.converged = true;
      result.sweeps = sweep - 1;
      break;
    }
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double wpq = w(p, q);
        if (wpq == 0.0) continue;
        const double theta = (w(q, q) - w(p, p)) / (2.0 * wpq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        const double wpp = w(p, p);
        const double wqq = w(q, q);
        w(p, p) = wpp - t * wpq;
        w(q, q) = wqq + t * wpq;
        w(p, q) = 0.0;
        w(q, p) = 0.0;
        for (Eigen::Index r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double wrp = w(r, p);
          const double wrq = w(r, q);
          w(r, p) = wrp - s * (wrq + tau * wrp);
          w(p, r) = w(r, p);
          w(r, q) = wrq + s * (wrp - tau * wrq);
          w(q, r) = w(r, q);
        }
      }
    }
    result.sweeps = sweep;
  }
  if (!result.converged && off_norm() <= tol * frob) result.converged = true;

  result.eigenvalues = w.diagonal();
  std::sort(result.eigenvalues.data(), result.eigenvalues.data() + n);
  return result;
}

}  // namespace pcpmkit
