#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <variant>

#include "recovery/extended_real.hpp"

namespace recovery {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Relative tolerance deciding when a functional is orthogonal to the free
// subspace of an approximability set (support value finite vs infinite).
inline constexpr double kOrthogonalityRtol = 1e-9;

// Largest shape-matrix condition number accepted at construction.
inline constexpr double kMaxShapeCondition = 1e12;

// K = { f : |A f|_2 <= 1 }, A invertible.
template <typename Scalar>
class EllipsoidSet {
 public:
  explicit EllipsoidSet(MatrixX<Scalar> shape) : shape_(std::move(shape)) {
    if (shape_.rows() != shape_.cols() || shape_.rows() < 1) {
      throw std::invalid_argument("EllipsoidSet: shape matrix must be square");
    }
    Eigen::JacobiSVD<MatrixX<Scalar>> svd(shape_);
    const Scalar smin = svd.singularValues().minCoeff();
    const Scalar smax = svd.singularValues().maxCoeff();
    if (!(smin > Scalar(0)) || !(smax / smin <= Scalar(kMaxShapeCondition))) {
      throw std::invalid_argument("EllipsoidSet: shape matrix is singular or ill conditioned");
    }
    inverse_ = shape_.inverse();
  }

  Eigen::Index dim() const { return shape_.rows(); }
  const MatrixX<Scalar>& shape() const { return shape_; }
  const MatrixX<Scalar>& shape_inverse() const { return inverse_; }

 private:
  MatrixX<Scalar> shape_;
  MatrixX<Scalar> inverse_;
};

// K = [-tau, tau]^n.
template <typename Scalar>
class BoxSet {
 public:
  BoxSet(Eigen::Index dim, Scalar tau) : dim_(dim), tau_(tau) {
    if (dim_ < 1) throw std::invalid_argument("BoxSet: dimension must be positive");
    if (!(tau_ > Scalar(0))) throw std::invalid_argument("BoxSet: tau must be positive");
  }

  Eigen::Index dim() const { return dim_; }
  Scalar tau() const { return tau_; }

 private:
  Eigen::Index dim_;
  Scalar tau_;
};

// K = { f : dist_2(f, range V) <= eps }, V with orthonormal columns.
template <typename Scalar>
class ApproximabilitySet {
 public:
  ApproximabilitySet(MatrixX<Scalar> basis, Scalar eps)
      : basis_(std::move(basis)), eps_(eps) {
    if (basis_.rows() < 1 || basis_.cols() < 1 || basis_.cols() > basis_.rows()) {
      throw std::invalid_argument("ApproximabilitySet: basis must be n x k with 1 <= k <= n");
    }
    if (!(eps_ > Scalar(0))) throw std::invalid_argument("ApproximabilitySet: eps must be positive");
    MatrixX<Scalar> gram = basis_.transpose() * basis_;
    gram.diagonal().array() -= Scalar(1);
    if (gram.cwiseAbs().maxCoeff() > Scalar(1e-10)) {
      throw std::invalid_argument("ApproximabilitySet: basis columns must be orthonormal");
    }
  }

  Eigen::Index dim() const { return basis_.rows(); }
  Eigen::Index rank() const { return basis_.cols(); }
  const MatrixX<Scalar>& basis() const { return basis_; }
  Scalar eps() const { return eps_; }

  // Component of x orthogonal to range(V).
  template <typename Derived>
  VectorX<Scalar> residual(const Eigen::MatrixBase<Derived>& x) const {
    return x - basis_ * (basis_.transpose() * x);
  }

 private:
  MatrixX<Scalar> basis_;
  Scalar eps_;
};

template <typename Scalar>
using ModelSetT = std::variant<EllipsoidSet<Scalar>, BoxSet<Scalar>, ApproximabilitySet<Scalar>>;

using Ellipsoid = EllipsoidSet<double>;
using Box = BoxSet<double>;
using Approximability = ApproximabilitySet<double>;
using ModelSet = ModelSetT<double>;

template <typename Scalar>
Eigen::Index ambient_dim(const ModelSetT<Scalar>& set) {
  return std::visit([](const auto& s) { return s.dim(); }, set);
}

namespace detail {

template <typename Scalar, typename Derived>
void check_dim(const ModelSetT<Scalar>& set, const Eigen::MatrixBase<Derived>& x,
               const char* who) {
  if (x.size() != ambient_dim(set)) {
    throw std::invalid_argument(std::string(who) + ": vector dimension does not match model set");
  }
}

}  // namespace detail

// Minkowski gauge |f|_K = inf { t > 0 : f in tK }. Finite for these sets
// (each contains a ball around the origin), returned as ExtendedReal for
// uniformity with support values.
template <typename Scalar, typename Derived>
ExtendedReal<Scalar> gauge(const ModelSetT<Scalar>& set, const Eigen::MatrixBase<Derived>& f) {
  detail::check_dim(set, f, "gauge");
  if (const auto* ell = std::get_if<EllipsoidSet<Scalar>>(&set)) {
    return ExtendedReal<Scalar>((ell->shape() * f).norm());
  }
  if (const auto* box = std::get_if<BoxSet<Scalar>>(&set)) {
    return ExtendedReal<Scalar>(f.cwiseAbs().maxCoeff() / box->tau());
  }
  const auto& app = std::get<ApproximabilitySet<Scalar>>(set);
  return ExtendedReal<Scalar>(app.residual(f).norm() / app.eps());
}

// sup_{f in K} |<c, f>|.
template <typename Scalar, typename Derived>
ExtendedReal<Scalar> support_value(const ModelSetT<Scalar>& set,
                                   const Eigen::MatrixBase<Derived>& c) {
  detail::check_dim(set, c, "support_value");
  if (const auto* ell = std::get_if<EllipsoidSet<Scalar>>(&set)) {
    return ExtendedReal<Scalar>((ell->shape_inverse().transpose() * c).norm());
  }
  if (const auto* box = std::get_if<BoxSet<Scalar>>(&set)) {
    return ExtendedReal<Scalar>(box->tau() * c.template lpNorm<1>());
  }
  const auto& app = std::get<ApproximabilitySet<Scalar>>(set);
  const Scalar cnorm = c.norm();
  const Scalar vpart = (app.basis().transpose() * c).norm();
  if (vpart > Scalar(kOrthogonalityRtol) * cnorm) {
    return ExtendedReal<Scalar>::infinity();
  }
  return ExtendedReal<Scalar>(app.eps() * cnorm);
}

// A maximizer f* in K with <c, f*> = support_value(K, c). Requires a finite
// support value; used as the support-term subgradient in the design solver.
template <typename Scalar, typename Derived>
VectorX<Scalar> support_maximizer(const ModelSetT<Scalar>& set,
                                  const Eigen::MatrixBase<Derived>& c) {
  detail::check_dim(set, c, "support_maximizer");
  if (const auto* ell = std::get_if<EllipsoidSet<Scalar>>(&set)) {
    VectorX<Scalar> w = ell->shape_inverse().transpose() * c;
    const Scalar s = w.norm();
    if (s == Scalar(0)) return VectorX<Scalar>::Zero(ell->dim());
    return ell->shape_inverse() * (w / s);
  }
  if (const auto* box = std::get_if<BoxSet<Scalar>>(&set)) {
    VectorX<Scalar> f(box->dim());
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      f[i] = c[i] > Scalar(0) ? box->tau() : (c[i] < Scalar(0) ? -box->tau() : Scalar(0));
    }
    return f;
  }
  const auto& app = std::get<ApproximabilitySet<Scalar>>(set);
  if (support_value(set, c).is_infinite()) {
    throw std::domain_error("support_maximizer: support value is infinite");
  }
  VectorX<Scalar> r = app.residual(c);
  const Scalar s = r.norm();
  if (s == Scalar(0)) return VectorX<Scalar>::Zero(app.dim());
  return app.eps() * (r / s);
}

template <typename Scalar>
struct RegularityReport {
  bool regular = true;
  // When irregular: unit h with gauge(h) = 0 and lambda h = 0.
  VectorX<Scalar> witness;
};

// Checks max(|h|_K, |lambda h|_2) > 0 for all h != 0. Only approximability
// sets have a nontrivial gauge kernel (range V), so the check reduces to
// full column rank of lambda V.
template <typename Scalar>
RegularityReport<Scalar> regularity_check(const ModelSetT<Scalar>& set,
                                          const MatrixX<Scalar>& lambda) {
  if (lambda.cols() != ambient_dim(set)) {
    throw std::invalid_argument("regularity_check: lambda columns must match model dimension");
  }
  RegularityReport<Scalar> report;
  const auto* app = std::get_if<ApproximabilitySet<Scalar>>(&set);
  if (app == nullptr) return report;

  MatrixX<Scalar> lv = lambda * app->basis();
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(lv, Eigen::ComputeFullV);
  const Scalar smax = svd.singularValues().maxCoeff();
  const Scalar smin = lv.rows() >= lv.cols() ? svd.singularValues().minCoeff() : Scalar(0);
  if (smin > Scalar(1e-10) * std::max(Scalar(1), smax)) return report;

  report.regular = false;
  VectorX<Scalar> z;
  if (lv.rows() >= lv.cols()) {
    z = svd.matrixV().col(lv.cols() - 1);
  } else {
    // Fewer measurement rows than free directions: any kernel vector of lv.
    Eigen::FullPivLU<MatrixX<Scalar>> lu(lv);
    z = lu.kernel().col(0).normalized();
  }
  report.witness = (app->basis() * z).normalized();
  return report;
}

}  // namespace recovery
