#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "pcpmkit/errors.hpp"
#include "pcpmkit/jacobi.hpp"
#include "pcpmkit/problem.hpp"
#include "pcpmkit/solvers.hpp"
#include "pcpmkit/stepsize.hpp"

namespace pcpmkit {

enum class ProximalMatrixSource { PcpmExplicit, LinearizedIdentity, GeneralExplicit, UserSupplied };

/// Proximal regularization matrix for the reference proximal ALM, with its
/// eigenvalue range (in-repo Jacobi eigensolve). Symmetric by construction.
struct ProximalMatrix {
  Eigen::MatrixXd P;
  ProximalMatrixSource source = ProximalMatrixSource::UserSupplied;
  double eig_min = 0.0;
  double eig_max = 0.0;
};

namespace detail {
inline Eigen::MatrixXd gram(const Eigen::MatrixXd& a) {  // A^T A, exactly symmetric
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(a.cols(), a.cols());
  g.selfadjointView<Eigen::Lower>().rankUpdate(a.transpose());
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return g;
}

inline void fill_eigen_range(ProximalMatrix& pm) {
  const SymmetricEigenResult eig = jacobi_eigenvalues(pm.P);
  pm.eig_min = eig.min();
  pm.eig_max = eig.max();
}
}  // namespace detail

/// The explicit proximal matrix that makes the proximal ALM coincide with
/// PCPM:
///   P = [ (1/lambda) I - lambda A^T A ,  lambda A^T            ]
///       [ lambda A                    ,  (1/lambda - lambda) I ]
inline ProximalMatrix build_pcpm_matrix(const Eigen::MatrixXd& a, double lambda) {
  if (!(lambda > 0.0)) throw ParameterError("build_pcpm_matrix: lambda must be positive");
  if (a.size() == 0) throw DimensionError("build_pcpm_matrix: A is empty");
  const Eigen::Index n = a.cols();
  const Eigen::Index m = a.rows();
  ProximalMatrix pm;
  pm.source = ProximalMatrixSource::PcpmExplicit;
  pm.P.resize(n + m, n + m);
  pm.P.topLeftCorner(n, n) = (1.0 / lambda) * Eigen::MatrixXd::Identity(n, n) - lambda * detail::gram(a);
  pm.P.topRightCorner(n, m) = lambda * a.transpose();
  pm.P.bottomLeftCorner(m, n) = pm.P.topRightCorner(n, m).transpose();
  pm.P.bottomRightCorner(m, m) = (1.0 / lambda - lambda) * Eigen::MatrixXd::Identity(m, m);
  detail::fill_eigen_range(pm);
  return pm;
}

/// The same matrix assembled the other way, P = (1/lambda) I - lambda M^T M
/// with M = (A, -I).
inline ProximalMatrix build_linearized_matrix(const Eigen::MatrixXd& a, double lambda) {
  if (!(lambda > 0.0)) throw ParameterError("build_linearized_matrix: lambda must be positive");
  const BlockReformulation reform = build_reformulation(a);
  ProximalMatrix pm;
  pm.source = ProximalMatrixSource::LinearizedIdentity;
  pm.P = (1.0 / lambda) * Eigen::MatrixXd::Identity(reform.theta_dim, reform.theta_dim) -
         lambda * (reform.M.transpose() * reform.M);
  pm.P = 0.5 * (pm.P + pm.P.transpose()).eval();
  detail::fill_eigen_range(pm);
  return pm;
}

/// Two-block proximal matrix:
///   P = [ (1/tau) I - lambda A^T A ,  -lambda A^T B             ]
///       [ -lambda B^T A            ,  (1/sigma) I - lambda B^T B ]
inline ProximalMatrix build_general_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                           double lambda, double tau, double sigma) {
  if (!(lambda > 0.0) || !(tau > 0.0) || !(sigma > 0.0))
    throw ParameterError("build_general_matrix: lambda, tau, sigma must be positive");
  if (a.rows() != b.rows())
    throw DimensionError("build_general_matrix: A has " + std::to_string(a.rows()) +
                         " rows, B has " + std::to_string(b.rows()));
  const Eigen::Index n = a.cols();
  const Eigen::Index l = b.cols();
  ProximalMatrix pm;
  pm.source = ProximalMatrixSource::GeneralExplicit;
  pm.P.resize(n + l, n + l);
  pm.P.topLeftCorner(n, n) = (1.0 / tau) * Eigen::MatrixXd::Identity(n, n) - lambda * detail::gram(a);
  pm.P.topRightCorner(n, l) = -lambda * (a.transpose() * b);
  pm.P.bottomLeftCorner(l, n) = pm.P.topRightCorner(n, l).transpose();
  pm.P.bottomRightCorner(l, l) =
      (1.0 / sigma) * Eigen::MatrixXd::Identity(l, l) - lambda * detail::gram(b);
  detail::fill_eigen_range(pm);
  return pm;
}

inline ProximalMatrix user_proximal_matrix(Eigen::MatrixXd p) {
  if (p.rows() != p.cols()) throw DimensionError("user_proximal_matrix: P must be square");
  ProximalMatrix pm;
  pm.source = ProximalMatrixSource::UserSupplied;
  pm.P = 0.5 * (p + p.transpose()).eval();
  detail::fill_eigen_range(pm);
  return pm;
}

/// Max-abs entry difference between the explicit block assembly and
/// (1/lambda) I - lambda M^T M. Contract: <= 1e-13 for desk-scale A.
inline double verify_linearized_identity(const Eigen::MatrixXd& a, double lambda) {
  const ProximalMatrix explicit_form = build_pcpm_matrix(a, lambda);
  const ProximalMatrix via_m = build_linearized_matrix(a, lambda);
  return (explicit_form.P - via_m.P).cwiseAbs().maxCoeff();
}

/// Reference proximal ALM on the block reformulation, restricted to
/// quadratic f, g so each primal subproblem is an exact dense solve:
///   u+ = argmin theta(u) + <y, res(u)> + (lambda/2)||res(u)||^2 + 0.5||u - u_k||_P^2
///   y+ = y + gamma lambda res(u+)
/// where res(u) = M u (splitting) or A x + B z - b (general). The system
/// matrix H + lambda K^T K + P must be positive definite (checked by Jacobi
/// eigensolve at construction).
class ProximalAlmSolver {
 public:
  ProximalAlmSolver(ProblemInstance problem, ProximalMatrix p, double lambda, double gamma)
      : problem_(std::move(problem)), p_(std::move(p)), lambda_(lambda), gamma_(gamma) {
    if (!(lambda_ > 0.0)) throw ParameterError("ProximalAlmSolver: lambda must be positive");
    detail::require_gamma_open_0_2(gamma_, "ProximalAlmSolver");

    const Eigen::Index n = problem_.n();
    const Eigen::Index zd = problem_.z_dim();
    const auto fq = problem_.f().quadratic_form(n);
    const auto gq = problem_.g().quadratic_form(zd);
    if (!fq || !gq)
      throw ParameterError("ProximalAlmSolver: f and g must be quadratic (zero or quad_affine)");

    if (problem_.form() == ProblemForm::Splitting) {
      stacked_ = build_reformulation(problem_).M;
      offset_ = Eigen::VectorXd::Zero(problem_.m());
    } else {
      stacked_.resize(problem_.m(), n + zd);
      stacked_.leftCols(n) = problem_.A();
      stacked_.rightCols(zd) = problem_.B();
      offset_ = problem_.b();
    }
    if (p_.P.rows() != n + zd)
      throw DimensionError("ProximalAlmSolver: P is " + std::to_string(p_.P.rows()) + "x" +
                           std::to_string(p_.P.cols()) + ", expected " + std::to_string(n + zd));

    hessian_ = Eigen::MatrixXd::Zero(n + zd, n + zd);
    hessian_.topLeftCorner(n, n) = fq->hessian;
    hessian_.bottomRightCorner(zd, zd) = gq->hessian;
    linear_.resize(n + zd);
    linear_.head(n) = fq->linear;
    linear_.tail(zd) = gq->linear;

    Eigen::MatrixXd system = hessian_ + lambda_ * detail::gram(stacked_) + p_.P;
    system = 0.5 * (system + system.transpose()).eval();
    const SymmetricEigenResult eig = jacobi_eigenvalues(system);
    if (!(eig.min() > 0.0))
      throw NotPositiveDefiniteError(
          "ProximalAlmSolver: system matrix H + lambda K^T K + P has min eigenvalue " +
          std::to_string(eig.min()));
    system_llt_.compute(system);
  }

  /// One proximal ALM iteration (exact primal solve + relaxed dual step).
  IterateState step(const IterateState& s) const {
    const Eigen::Index n = problem_.n();
    const Eigen::Index zd = problem_.z_dim();
    Eigen::VectorXd u(n + zd);
    u.head(n) = s.x;
    u.tail(zd) = s.z;
    const Eigen::VectorXd rhs =
        p_.P * u - linear_ - stacked_.transpose() * s.y + lambda_ * (stacked_.transpose() * offset_);
    const Eigen::VectorXd u_next = system_llt_.solve(rhs);
    IterateState next;
    next.x = u_next.head(n);
    next.z = u_next.tail(zd);
    next.y = s.y + (gamma_ * lambda_) * (stacked_ * u_next - offset_);
    next.p = s.y + lambda_ * (stacked_ * u - offset_);  // the predictor PCPM would form
    next.k = s.k + 1;
    return next;
  }

  RunReport run(IterateState start, const RunOptions& opts) const {
    return detail::run_iterations(problem_, opts, std::move(start),
                                  [this](const IterateState& s) { return step(s); });
  }

  const ProblemInstance& problem() const { return problem_; }
  const ProximalMatrix& proximal_matrix() const { return p_; }

 private:
  ProblemInstance problem_;
  ProximalMatrix p_;
  double lambda_;
  double gamma_;
  Eigen::MatrixXd stacked_;  // (A, -I) or (A, B)
  Eigen::VectorXd offset_;   // 0 or b
  Eigen::MatrixXd hessian_;  // blkdiag of the quadratic Hessians
  Eigen::VectorXd linear_;
  Eigen::LLT<Eigen::MatrixXd> system_llt_;
};

inline RunReport run_proximal_alm(const ProblemInstance& pr, const ProximalMatrix& p, double lambda,
                                  double gamma, const RunOptions& opts,
                                  IterateState start) {
  return ProximalAlmSolver(pr, p, lambda, gamma).run(std::move(start), opts);
}

inline RunReport run_proximal_alm(const ProblemInstance& pr, const ProximalMatrix& p, double lambda,
                                  double gamma, const RunOptions& opts) {
  return run_proximal_alm(pr, p, lambda, gamma, opts, zero_start(pr));
}

/// Indefinite-proximal admissibility: a factor tau3 in ((2+gamma)/4, 1) with
/// D = (1/lambda) I - tau3 lambda M^T M positive definite. The search is
/// analytic - D > 0 iff tau3 < 1/(lambda^2 ||M||^2) with ||M||^2 = ||A||^2+1 -
/// and the witness is verified by an eigensolve of D.
struct IdpAdmissibility {
  bool admissible = false;
  double tau_lo = 0.0;  // (2+gamma)/4
  double tau_hi = 0.0;  // min(1, 1/(lambda^2 (||A||^2+1)))
  double tau3 = 0.0;    // witness (interval midpoint) when admissible
  Eigen::MatrixXd D;    // (1/lambda) I - tau3 lambda M^T M at the witness
  double d_min_eigenvalue = 0.0;
  double norm_a = 0.0;
  double bound = 0.0;  // bound_new(||A||, gamma), where existence flips
};

inline IdpAdmissibility check_idp_admissibility(const Eigen::MatrixXd& a, double lambda,
                                                double gamma) {
  if (!(lambda > 0.0)) throw ParameterError("check_idp_admissibility: lambda must be positive");
  detail::require_gamma_open_0_2(gamma, "check_idp_admissibility");

  IdpAdmissibility r;
  r.norm_a = spectral_norm(a).value;
  r.bound = bound_new(r.norm_a, gamma);
  const double m_norm_sq = r.norm_a * r.norm_a + 1.0;
  r.tau_lo = (2.0 + gamma) / 4.0;
  r.tau_hi = std::min(1.0, 1.0 / (lambda * lambda * m_norm_sq));
  if (!(r.tau_hi > r.tau_lo)) return r;  // no witness; a valid report

  r.tau3 = 0.5 * (r.tau_lo + r.tau_hi);
  const BlockReformulation reform = build_reformulation(a);
  r.D = (1.0 / lambda) * Eigen::MatrixXd::Identity(reform.theta_dim, reform.theta_dim) -
        (r.tau3 * lambda) * detail::gram(reform.M);
  const SymmetricEigenResult eig = jacobi_eigenvalues(r.D);
  r.d_min_eigenvalue = eig.min();
  r.admissible = r.d_min_eigenvalue > 0.0;
  return r;
}

/// Lockstep comparison of PCPM and the proximal ALM with the explicit P:
/// the two must produce the same iterates on quadratic problems.
struct EquivalenceReport {
  double max_deviation = 0.0;  // max over iterations of the max-abs (x,z,y) gap
  int iterations = 0;
};

inline EquivalenceReport check_pcpm_alm_equivalence(const ProblemInstance& pr, double lambda,
                                                    int iterations) {
  detail::require_form(pr, ProblemForm::Splitting, "check_pcpm_alm_equivalence");
  if (iterations <= 0) throw ParameterError("check_pcpm_alm_equivalence: iterations must be positive");
  const ProximalMatrix p = build_pcpm_matrix(pr.A(), lambda);
  const ProximalAlmSolver alm(pr, p, lambda, 1.0);
  IterateState pcpm_state = zero_start(pr);
  IterateState alm_state = zero_start(pr);
  EquivalenceReport report;
  report.iterations = iterations;
  for (int k = 0; k < iterations; ++k) {
    pcpm_state = pcpm_step(pr, lambda, pcpm_state);
    alm_state = alm.step(alm_state);
    const double dev =
        std::max({(pcpm_state.x - alm_state.x).cwiseAbs().maxCoeff(),
                  (pcpm_state.z - alm_state.z).cwiseAbs().maxCoeff(),
                  (pcpm_state.y - alm_state.y).cwiseAbs().maxCoeff()});
    report.max_deviation = std::max(report.max_deviation, dev);
  }
  return report;
}

}  // namespace pcpmkit
