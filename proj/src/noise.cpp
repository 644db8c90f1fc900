#include "recovery/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "recovery/constants.hpp"
#include "recovery/reduction.hpp"
#include "recovery/rng.hpp"

namespace recovery {

namespace {

void check_sigma(double sigma) {
  if (std::isnan(sigma) || sigma < 0) {
    throw std::invalid_argument("NoiseModel: sigma must be nonnegative");
  }
}

double draw_entry(NoiseKind kind, double sigma, std::uint64_t seed, std::int64_t index,
                  Eigen::Index j) {
  const double u = uniform_open(seed, static_cast<std::uint64_t>(index),
                                static_cast<std::uint64_t>(j));
  switch (kind) {
    case NoiseKind::kGaussian:
      return sigma * normal_quantile(u);
    case NoiseKind::kLaplace:
      return laplace_quantile(u, sigma / std::numbers::sqrt2);
    case NoiseKind::kUniform:
      return sigma * std::numbers::sqrt3 * (2.0 * u - 1.0);
    case NoiseKind::kRademacher:
      return u < 0.5 ? -sigma : sigma;
    case NoiseKind::kCorrelated:
      break;
  }
  throw std::logic_error("draw_entry: correlated noise has no direct entries");
}

}  // namespace

std::string noise_kind_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kGaussian: return "gaussian";
    case NoiseKind::kLaplace: return "laplace";
    case NoiseKind::kUniform: return "uniform";
    case NoiseKind::kRademacher: return "rademacher";
    case NoiseKind::kCorrelated: return "correlated";
  }
  return "unknown";
}

NoiseModel::NoiseModel(NoiseKind kind, double sigma, Eigen::Index m)
    : kind_(kind), base_kind_(kind), sigma_(sigma), m_(m) {
  check_sigma(sigma);
  if (m < 1) throw std::invalid_argument("NoiseModel: dimension must be positive");
}

NoiseModel NoiseModel::gaussian(double sigma, Eigen::Index m) {
  return NoiseModel(NoiseKind::kGaussian, sigma, m);
}

NoiseModel NoiseModel::laplace(double sigma, Eigen::Index m) {
  return NoiseModel(NoiseKind::kLaplace, sigma, m);
}

NoiseModel NoiseModel::uniform(double sigma, Eigen::Index m) {
  return NoiseModel(NoiseKind::kUniform, sigma, m);
}

NoiseModel NoiseModel::rademacher(double sigma) {
  return NoiseModel(NoiseKind::kRademacher, sigma, 1);
}

NoiseModel NoiseModel::correlated(const NoiseModel& base, Eigen::MatrixXd mixing) {
  if (base.kind_ == NoiseKind::kCorrelated) {
    throw std::invalid_argument("NoiseModel: correlated base must be isotropic");
  }
  if (mixing.rows() != base.dim() || mixing.cols() != base.dim()) {
    throw std::invalid_argument("NoiseModel: mixing matrix must be m x m");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(mixing);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (!(smin > 0) || !(smax / smin <= 1e12)) {
    throw std::invalid_argument("NoiseModel: mixing matrix is singular or ill conditioned");
  }
  NoiseModel model(NoiseKind::kCorrelated, base.sigma_, base.dim());
  model.kind_ = NoiseKind::kCorrelated;
  model.base_kind_ = base.kind_;
  model.mixing_ = std::move(mixing);
  return model;
}

Eigen::MatrixXd NoiseModel::covariance() const {
  const double s2 = sigma_ * sigma_;
  if (kind_ != NoiseKind::kCorrelated) {
    return s2 * Eigen::MatrixXd::Identity(m_, m_);
  }
  return s2 * (mixing_ * mixing_.transpose());
}

Eigen::MatrixXd NoiseModel::mixing() const {
  if (kind_ == NoiseKind::kCorrelated) return mixing_;
  return Eigen::MatrixXd::Identity(m_, m_);
}

double NoiseModel::linear_scale(const Eigen::VectorXd& a) const {
  if (a.size() != m_) throw std::invalid_argument("linear_scale: dimension mismatch");
  if (kind_ == NoiseKind::kCorrelated) return sigma_ * (mixing_.transpose() * a).norm();
  return sigma_ * a.norm();
}

Eigen::VectorXd NoiseModel::mixed_functional(const Eigen::VectorXd& a) const {
  if (a.size() != m_) throw std::invalid_argument("mixed_functional: dimension mismatch");
  if (kind_ == NoiseKind::kCorrelated) return mixing_.transpose() * a;
  return a;
}

void NoiseModel::sample_row(std::uint64_t seed, std::int64_t index,
                            Eigen::Ref<Eigen::VectorXd> out) const {
  if (out.size() != m_) throw std::invalid_argument("sample_row: dimension mismatch");
  if (kind_ != NoiseKind::kCorrelated) {
    for (Eigen::Index j = 0; j < m_; ++j) out[j] = draw_entry(kind_, sigma_, seed, index, j);
    return;
  }
  Eigen::VectorXd base(m_);
  for (Eigen::Index j = 0; j < m_; ++j) base[j] = draw_entry(base_kind_, sigma_, seed, index, j);
  out = mixing_ * base;
}

Eigen::MatrixXd NoiseModel::sample(Eigen::Index count, std::uint64_t seed) const {
  if (count < 1) throw std::invalid_argument("sample: count must be positive");
  Eigen::MatrixXd draws(count, m_);
  Eigen::VectorXd row(m_);
  for (Eigen::Index i = 0; i < count; ++i) {
    sample_row(seed, i, row);
    draws.row(i) = row.transpose();
  }
  return draws;
}

BorellCheck borell_ratio_check(const NoiseModel& model, const Eigen::VectorXd& u, double p,
                               double q, std::int64_t count, std::uint64_t seed) {
  if (u.size() != model.dim()) throw std::invalid_argument("borell_ratio_check: dimension mismatch");
  if (!(p >= 1) || !(q > p)) {
    throw std::invalid_argument("borell_ratio_check: exponents must satisfy 1 <= p < q");
  }
  if (count < 2) throw std::invalid_argument("borell_ratio_check: count must be at least 2");

  // Statistics per draw: X = |<u,e>|^q, Y = |<u,e>|^p, XY (for the covariance).
  BlockedMoments mo = blocked_moments(count, 3, [&](std::int64_t i, double* out) {
    Eigen::VectorXd e(model.dim());
    model.sample_row(seed, i, e);
    const double z = std::abs(u.dot(e));
    const double x = std::pow(z, q);
    const double y = std::pow(z, p);
    out[0] = x;
    out[1] = y;
    out[2] = x * y;
  });

  const double n = static_cast<double>(count);
  const double mx = mo.mean(0);
  const double my = mo.mean(1);
  const double var_mx = mo.variance(0) / (n - 1);
  const double var_my = mo.variance(1) / (n - 1);
  const double cov_xy = (mo.mean(2) - mx * my) / (n - 1);

  BorellCheck check;
  check.bound = constants::kBorellC * q / p;
  check.lemma_applicable = model.is_log_concave();
  if (mx <= 0 || my <= 0) {
    // Degenerate draws (sigma = 0): ratio is 0/0; report vacuously in bound.
    check.ratio = 0;
    check.std_error = 0;
    check.within_bound = true;
    return check;
  }
  check.ratio = std::pow(mx, 1.0 / q) / std::pow(my, 1.0 / p);
  const double dx = check.ratio / (q * mx);
  const double dy = -check.ratio / (p * my);
  const double var_r = dx * dx * var_mx + dy * dy * var_my + 2 * dx * dy * cov_xy;
  check.std_error = var_r > 0 ? std::sqrt(var_r) : 0;
  check.within_bound = check.ratio <= check.bound + 3 * check.std_error;
  return check;
}

DensityDiagnostics density_floor_check(const NoiseModel& model) {
  if (model.dim() != 1) {
    throw std::domain_error("density_floor_check: only one-dimensional models");
  }
  const double sigma = model.sigma();
  if (!(sigma > 0)) throw std::domain_error("density_floor_check: sigma must be positive");

  std::function<double(double)> density;
  switch (model.kind()) {
    case NoiseKind::kGaussian:
      density = [sigma](double x) {
        return std::exp(-0.5 * x * x / (sigma * sigma)) /
               (sigma * std::sqrt(2.0 * std::numbers::pi));
      };
      break;
    case NoiseKind::kLaplace: {
      const double b = sigma / std::numbers::sqrt2;
      density = [b](double x) { return std::exp(-std::abs(x) / b) / (2.0 * b); };
      break;
    }
    case NoiseKind::kUniform: {
      const double w = std::numbers::sqrt3 * sigma;
      density = [w](double x) { return std::abs(x) <= w ? 1.0 / (2.0 * w) : 0.0; };
      break;
    }
    default:
      throw std::domain_error("density_floor_check: model has no density diagnostic");
  }

  DensityDiagnostics diag;
  diag.pi0 = density(0.0);
  const double half_width = constants::kGamma * sigma;
  const int grid = 1001;
  double min_density = diag.pi0;
  for (int i = 0; i < grid; ++i) {
    const double x = -half_width + 2.0 * half_width * i / (grid - 1);
    min_density = std::min(min_density, density(x));
  }
  diag.min_density = min_density;
  diag.floor_ok = min_density >= constants::kDelta / sigma;
  diag.hensley_ok =
      diag.pi0 >= constants::hensley_lower(sigma) && diag.pi0 <= constants::hensley_upper(sigma);
  return diag;
}

}  // namespace recovery
