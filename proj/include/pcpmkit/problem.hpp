#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <optional>
#include <string>
#include <utility>

#include "pcpmkit/errors.hpp"
#include "pcpmkit/prox.hpp"

namespace pcpmkit {

enum class ProblemForm { Splitting, General };

inline const char* to_string(ProblemForm f) {
  return f == ProblemForm::Splitting ? "splitting" : "general";
}

/// A separable convex program. Two forms:
///   Splitting:  min f(x) + g(z)  s.t.  A x = z        (A is m x n, z in R^m)
///   General:    min f(x) + g(z)  s.t.  A x + B z = b  (B is m x l, z in R^l)
/// f and g are reachable only through value/prox evaluation. Instances are
/// immutable after construction and safe to share across threads.
class ProblemInstance {
 public:
  ProblemInstance(ProxFunction f, ProxFunction g, Eigen::MatrixXd a)
      : f_(std::move(f)), g_(std::move(g)), a_(std::move(a)), form_(ProblemForm::Splitting) {
    validate();
  }

  ProblemInstance(ProxFunction f, ProxFunction g, Eigen::MatrixXd a, Eigen::MatrixXd b_mat,
                  Eigen::VectorXd b_rhs)
      : f_(std::move(f)),
        g_(std::move(g)),
        a_(std::move(a)),
        b_mat_(std::move(b_mat)),
        b_rhs_(std::move(b_rhs)),
        form_(ProblemForm::General) {
    validate();
  }

  ProblemForm form() const { return form_; }
  const ProxFunction& f() const { return f_; }
  const ProxFunction& g() const { return g_; }
  const Eigen::MatrixXd& A() const { return a_; }

  const Eigen::MatrixXd& B() const {
    if (form_ != ProblemForm::General) throw FormError("ProblemInstance: B only exists in general form");
    return *b_mat_;
  }
  const Eigen::VectorXd& b() const {
    if (form_ != ProblemForm::General) throw FormError("ProblemInstance: b only exists in general form");
    return *b_rhs_;
  }

  Eigen::Index n() const { return a_.cols(); }  // x dimension
  Eigen::Index m() const { return a_.rows(); }  // constraint rows
  /// z dimension: m in splitting form, l = cols(B) in general form.
  Eigen::Index z_dim() const { return form_ == ProblemForm::Splitting ? a_.rows() : b_mat_->cols(); }

 private:
  void validate() const {
    if (a_.size() == 0) throw DimensionError("ProblemInstance: A is empty");
    if (form_ == ProblemForm::General) {
      if (b_mat_->rows() != a_.rows())
        throw DimensionError("ProblemInstance: B has " + std::to_string(b_mat_->rows()) +
                             " rows, expected m = " + std::to_string(a_.rows()) + " (rows of A)");
      if (b_mat_->cols() == 0) throw DimensionError("ProblemInstance: B has no columns");
      if (b_rhs_->size() != a_.rows())
        throw DimensionError("ProblemInstance: b has length " + std::to_string(b_rhs_->size()) +
                             ", expected m = " + std::to_string(a_.rows()) + " (rows of A)");
    }
    if (auto dim = f_.domain_dim(); dim && *dim != n())
      throw DimensionError("ProblemInstance: f expects dimension " + std::to_string(*dim) +
                           ", x has dimension n = " + std::to_string(n()));
    if (auto dim = g_.domain_dim(); dim && *dim != z_dim())
      throw DimensionError("ProblemInstance: g expects dimension " + std::to_string(*dim) +
                           ", z has dimension " + std::to_string(z_dim()));
  }

  ProxFunction f_;
  ProxFunction g_;
  Eigen::MatrixXd a_;
  std::optional<Eigen::MatrixXd> b_mat_;
  std::optional<Eigen::VectorXd> b_rhs_;
  ProblemForm form_;
};

/// Stacked-block view of a splitting problem: u = (x; z), M = (A, -I),
/// constraint M u = 0.
struct BlockReformulation {
  Eigen::MatrixXd M;       // m x (n + m)
  Eigen::Index theta_dim;  // n + m
};

inline BlockReformulation build_reformulation(const Eigen::MatrixXd& a) {
  if (a.size() == 0) throw DimensionError("build_reformulation: A is empty");
  const Eigen::Index n = a.cols();
  const Eigen::Index m = a.rows();
  BlockReformulation r;
  r.M.resize(m, n + m);
  r.M.leftCols(n) = a;
  r.M.rightCols(m) = -Eigen::MatrixXd::Identity(m, m);
  r.theta_dim = n + m;
  return r;
}

inline BlockReformulation build_reformulation(const ProblemInstance& p) {
  if (p.form() != ProblemForm::Splitting)
    throw FormError("build_reformulation: only splitting-form problems have M = (A, -I)");
  return build_reformulation(p.A());
}

/// Constraint violation A x - z (splitting) or A x + B z - b (general).
inline Eigen::VectorXd constraint_violation(const ProblemInstance& p, const Eigen::VectorXd& x,
                                            const Eigen::VectorXd& z) {
  if (x.size() != p.n())
    throw DimensionError("constraint_violation: x has length " + std::to_string(x.size()) +
                         ", expected n = " + std::to_string(p.n()));
  if (z.size() != p.z_dim())
    throw DimensionError("constraint_violation: z has length " + std::to_string(z.size()) +
                         ", expected " + std::to_string(p.z_dim()));
  if (p.form() == ProblemForm::Splitting) return p.A() * x - z;
  return p.A() * x + p.B() * z - p.b();
}

struct SaddlePointResidual {
  double primal = 0.0;
  double dual_x = 0.0;
  double dual_z = 0.0;
  double objective = 0.0;

  double max_residual() const { return std::max({primal, dual_x, dual_z}); }
};

/// Optimality residuals at (x, z, y). Primal: constraint violation norm.
/// Dual: prox fixed-point residuals with reference step t0 = 1, e.g.
/// ||x - prox_f(x - A^T y, 1)|| for the x block.
inline SaddlePointResidual residuals(const ProblemInstance& p, const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& z, const Eigen::VectorXd& y) {
  if (y.size() != p.m())
    throw DimensionError("residuals: y has length " + std::to_string(y.size()) +
                         ", expected m = " + std::to_string(p.m()));
  constexpr double t0 = 1.0;
  SaddlePointResidual r;
  r.primal = constraint_violation(p, x, z).norm();
  r.dual_x = (x - p.f().prox(x - p.A().transpose() * y, t0)).norm() / t0;
  const Eigen::VectorXd z_point =
      p.form() == ProblemForm::Splitting ? (z + y).eval() : (z - p.B().transpose() * y).eval();
  r.dual_z = (z - p.g().prox(z_point, t0)).norm() / t0;
  r.objective = p.f().value(x) + p.g().value(z);
  return r;
}

}  // namespace pcpmkit
