#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "pcpmkit/errors.hpp"

namespace pcpmkit {

enum class ProxKind { Zero, L1, QuadAffine, Box, Custom };

inline const char* to_string(ProxKind k) {
  switch (k) {
    case ProxKind::Zero: return "zero";
    case ProxKind::L1: return "l1";
    case ProxKind::QuadAffine: return "quad_affine";
    case ProxKind::Box: return "box";
    case ProxKind::Custom: return "custom";
  }
  return "?";
}

namespace detail {
inline void require_prox_step(double t, const char* where) {
  if (!(t > 0.0)) throw ParameterError(std::string(where) + ": t must be positive");
}
}  // namespace detail

/// Soft threshold: argmin_u mu*||u||_1 + (1/(2t))||u - v||^2, componentwise
/// sign(v_i) * max(|v_i| - t*mu, 0).
inline Eigen::VectorXd prox_l1(const Eigen::VectorXd& v, double t, double mu) {
  detail::require_prox_step(t, "prox_l1");
  if (!(mu >= 0.0)) throw ParameterError("prox_l1: mu must be nonnegative");
  const double cut = t * mu;
  Eigen::VectorXd u(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i)) - cut;
    u(i) = mag > 0.0 ? (v(i) > 0.0 ? mag : -mag) : 0.0;
  }
  return u;
}

/// argmin_u 0.5*||C u - d||^2 + (1/(2t))||u - v||^2, i.e. the solution of
/// (I + t C^T C) u = v + t C^T d. One-shot factorization; the cached form
/// lives behind ProxFunction::quad_affine.
inline Eigen::VectorXd prox_quad_affine(const Eigen::VectorXd& v, double t,
                                        const Eigen::MatrixXd& c, const Eigen::VectorXd& d) {
  detail::require_prox_step(t, "prox_quad_affine");
  if (c.cols() != v.size())
    throw DimensionError("prox_quad_affine: C has " + std::to_string(c.cols()) +
                         " columns, v has length " + std::to_string(v.size()));
  if (c.rows() != d.size())
    throw DimensionError("prox_quad_affine: C has " + std::to_string(c.rows()) +
                         " rows, d has length " + std::to_string(d.size()));
  const Eigen::Index n = v.size();
  Eigen::MatrixXd sys = Eigen::MatrixXd::Identity(n, n);
  sys.selfadjointView<Eigen::Lower>().rankUpdate(c.transpose(), t);
  sys.triangularView<Eigen::StrictlyUpper>() = sys.transpose();
  return Eigen::LLT<Eigen::MatrixXd>(sys).solve(v + t * (c.transpose() * d));
}

/// Projection onto the box [lo, hi]; independent of t.
inline Eigen::VectorXd prox_box(const Eigen::VectorXd& v, double t, const Eigen::VectorXd& lo,
                                const Eigen::VectorXd& hi) {
  detail::require_prox_step(t, "prox_box");
  if (lo.size() != v.size() || hi.size() != v.size())
    throw DimensionError("prox_box: bounds have lengths " + std::to_string(lo.size()) + "/" +
                         std::to_string(hi.size()) + ", v has length " +
                         std::to_string(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (lo(i) > hi(i))
      throw ParameterError("prox_box: lo > hi in component " + std::to_string(i));
  return v.cwiseMax(lo).cwiseMin(hi);
}

/// Quadratic structure 0.5 u^T H u + q^T u + c of a prox function, when it has one.
struct QuadraticForm {
  Eigen::MatrixXd hessian;
  Eigen::VectorXd linear;
  double constant = 0.0;
};

/// A closed proper convex function exposed through value and prox evaluation
/// only. Copies are cheap handles onto shared immutable parameters; the
/// quad-affine factorization cache is shared and internally synchronized, so
/// instances can be used from concurrent solver runs.
class ProxFunction {
 public:
  using ValueFn = std::function<double(const Eigen::VectorXd&)>;
  using ProxFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)>;

  static ProxFunction zero() { return ProxFunction(ZeroParams{}); }

  static ProxFunction l1(double mu) {
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw ParameterError("ProxFunction::l1: mu must be finite and nonnegative");
    return ProxFunction(L1Params{mu});
  }

  /// f(u) = 0.5*||C u - d||^2. Factorizations of (I + t C^T C) are cached per
  /// t, since solvers evaluate the prox with a fixed t every iteration.
  static ProxFunction quad_affine(Eigen::MatrixXd c, Eigen::VectorXd d) {
    if (c.size() == 0) throw DimensionError("ProxFunction::quad_affine: C is empty");
    if (c.rows() != d.size())
      throw DimensionError("ProxFunction::quad_affine: C has " + std::to_string(c.rows()) +
                           " rows, d has length " + std::to_string(d.size()));
    if (!c.allFinite() || !d.allFinite())
      throw ParameterError("ProxFunction::quad_affine: C, d must be finite");
    QuadParams p;
    const Eigen::Index n = c.cols();
    p.gram = Eigen::MatrixXd::Zero(n, n);
    p.gram.selfadjointView<Eigen::Lower>().rankUpdate(c.transpose());
    p.gram.triangularView<Eigen::StrictlyUpper>() = p.gram.transpose();
    p.ct_d = c.transpose() * d;
    p.d_sq = 0.5 * d.squaredNorm();
    p.c = std::move(c);
    p.d = std::move(d);
    p.cache = std::make_shared<QuadCache>();
    return ProxFunction(std::move(p));
  }

  /// Indicator of the box [lo, hi]: 0 inside, +inf outside.
  static ProxFunction box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
    if (lo.size() != hi.size())
      throw DimensionError("ProxFunction::box: lo has length " + std::to_string(lo.size()) +
                           ", hi has length " + std::to_string(hi.size()));
    if (!lo.allFinite() || !hi.allFinite())
      throw ParameterError("ProxFunction::box: bounds must be finite");
    for (Eigen::Index i = 0; i < lo.size(); ++i)
      if (lo(i) > hi(i))
        throw ParameterError("ProxFunction::box: lo > hi in component " + std::to_string(i));
    return ProxFunction(BoxParams{std::move(lo), std::move(hi)});
  }

  static ProxFunction custom(ValueFn value, ProxFn prox) {
    if (!value || !prox) throw ParameterError("ProxFunction::custom: both callbacks required");
    return ProxFunction(CustomParams{std::move(value), std::move(prox)});
  }

  ProxKind kind() const {
    return std::visit(
        [](const auto& p) -> ProxKind {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, ZeroParams>) return ProxKind::Zero;
          else if constexpr (std::is_same_v<T, L1Params>) return ProxKind::L1;
          else if constexpr (std::is_same_v<T, QuadParams>) return ProxKind::QuadAffine;
          else if constexpr (std::is_same_v<T, BoxParams>) return ProxKind::Box;
          else return ProxKind::Custom;
        },
        *params_);
  }

  /// Extended-real function value; box indicators return +inf outside the box.
  double value(const Eigen::VectorXd& v) const {
    return std::visit(
        [&](const auto& p) -> double {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, ZeroParams>) {
            return 0.0;
          } else if constexpr (std::is_same_v<T, L1Params>) {
            return p.mu * v.lpNorm<1>();
          } else if constexpr (std::is_same_v<T, QuadParams>) {
            if (p.c.cols() != v.size())
              throw DimensionError("ProxFunction::value: v has length " + std::to_string(v.size()) +
                                   ", expected " + std::to_string(p.c.cols()));
            return 0.5 * (p.c * v - p.d).squaredNorm();
          } else if constexpr (std::is_same_v<T, BoxParams>) {
            if (p.lo.size() != v.size())
              throw DimensionError("ProxFunction::value: v has length " + std::to_string(v.size()) +
                                   ", expected " + std::to_string(p.lo.size()));
            for (Eigen::Index i = 0; i < v.size(); ++i)
              if (v(i) < p.lo(i) || v(i) > p.hi(i))
                return std::numeric_limits<double>::infinity();
            return 0.0;
          } else {
            return p.value(v);
          }
        },
        *params_);
  }

  /// argmin_u f(u) + (1/(2t))||u - v||^2, t > 0.
  Eigen::VectorXd prox(const Eigen::VectorXd& v, double t) const {
    detail::require_prox_step(t, "ProxFunction::prox");
    return std::visit(
        [&](const auto& p) -> Eigen::VectorXd {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, ZeroParams>) {
            return v;
          } else if constexpr (std::is_same_v<T, L1Params>) {
            return prox_l1(v, t, p.mu);
          } else if constexpr (std::is_same_v<T, QuadParams>) {
            return quad_prox(p, v, t);
          } else if constexpr (std::is_same_v<T, BoxParams>) {
            return prox_box(v, t, p.lo, p.hi);
          } else {
            return p.prox(v, t);
          }
        },
        *params_);
  }

  /// Dimension the parameters pin down, when they pin one down.
  std::optional<Eigen::Index> domain_dim() const {
    switch (kind()) {
      case ProxKind::QuadAffine: return std::get<QuadParams>(*params_).c.cols();
      case ProxKind::Box: return std::get<BoxParams>(*params_).lo.size();
      default: return std::nullopt;
    }
  }

  /// 0.5 u^T H u + q^T u + c when the function is quadratic (zero or
  /// quad_affine); nullopt otherwise. `dim` supplies the dimension for the
  /// zero function, which has none of its own.
  std::optional<QuadraticForm> quadratic_form(Eigen::Index dim) const {
    if (kind() == ProxKind::Zero) {
      QuadraticForm q;
      q.hessian = Eigen::MatrixXd::Zero(dim, dim);
      q.linear = Eigen::VectorXd::Zero(dim);
      return q;
    }
    if (kind() == ProxKind::QuadAffine) {
      const auto& p = std::get<QuadParams>(*params_);
      if (p.c.cols() != dim)
        throw DimensionError("ProxFunction::quadratic_form: dim " + std::to_string(dim) +
                             " does not match C with " + std::to_string(p.c.cols()) + " columns");
      QuadraticForm q;
      q.hessian = p.gram;
      q.linear = -p.ct_d;
      q.constant = p.d_sq;
      return q;
    }
    return std::nullopt;
  }

  // parameter access for serialization
  double l1_weight() const { return std::get<L1Params>(*params_).mu; }
  const Eigen::MatrixXd& quad_matrix() const { return std::get<QuadParams>(*params_).c; }
  const Eigen::VectorXd& quad_offset() const { return std::get<QuadParams>(*params_).d; }
  const Eigen::VectorXd& box_lo() const { return std::get<BoxParams>(*params_).lo; }
  const Eigen::VectorXd& box_hi() const { return std::get<BoxParams>(*params_).hi; }

 private:
  struct ZeroParams {};
  struct L1Params {
    double mu;
  };
  struct QuadCache {
    std::mutex mutex;
    std::map<double, std::shared_ptr<const Eigen::LLT<Eigen::MatrixXd>>> by_step;
  };
  struct QuadParams {
    Eigen::MatrixXd c;
    Eigen::VectorXd d;
    Eigen::MatrixXd gram;  // C^T C
    Eigen::VectorXd ct_d;  // C^T d
    double d_sq = 0.0;     // 0.5 ||d||^2
    std::shared_ptr<QuadCache> cache;
  };
  struct BoxParams {
    Eigen::VectorXd lo, hi;
  };
  struct CustomParams {
    ValueFn value;
    ProxFn prox;
  };
  using Params = std::variant<ZeroParams, L1Params, QuadParams, BoxParams, CustomParams>;

  explicit ProxFunction(Params p) : params_(std::make_shared<const Params>(std::move(p))) {}

  static Eigen::VectorXd quad_prox(const QuadParams& p, const Eigen::VectorXd& v, double t) {
    if (p.c.cols() != v.size())
      throw DimensionError("ProxFunction::prox: v has length " + std::to_string(v.size()) +
                           ", expected " + std::to_string(p.c.cols()));
    std::shared_ptr<const Eigen::LLT<Eigen::MatrixXd>> llt;
    {
      std::lock_guard<std::mutex> lock(p.cache->mutex);
      auto it = p.cache->by_step.find(t);
      if (it == p.cache->by_step.end()) {
        Eigen::MatrixXd sys = Eigen::MatrixXd::Identity(v.size(), v.size()) + t * p.gram;
        it = p.cache->by_step.emplace(t, std::make_shared<Eigen::LLT<Eigen::MatrixXd>>(sys)).first;
      }
      llt = it->second;
    }
    return llt->solve(v + t * p.ct_d);
  }

  std::shared_ptr<const Params> params_;
};

}  // namespace pcpmkit
