#include "recovery/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "recovery/reduction.hpp"

namespace recovery {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double power(double x, double p) {
  if (p == 1.0) return x;
  if (p == 2.0) return x * x;
  if (p == 4.0) {
    const double x2 = x * x;
    return x2 * x2;
  }
  return std::pow(x, p);
}

double root(double x, double p) {
  if (x <= 0) return 0;
  if (p == 1.0) return x;
  if (p == 2.0) return std::sqrt(x);
  if (p == 4.0) return std::sqrt(std::sqrt(x));
  return std::pow(x, 1.0 / p);
}

// Standard error of mean^(1/p) from the standard error of the mean.
double root_std_error(double mean, double mean_se, double p) {
  if (mean <= 0 || mean_se == 0) return 0;
  return mean_se / p * std::pow(mean, 1.0 / p - 1.0);
}

void check_common(double p, std::int64_t count) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw std::invalid_argument("risk: p must be a finite value >= 1");
  }
  if (count < 2) throw std::invalid_argument("risk: sample count must be at least 2");
}

RiskEstimate exact_estimate(RiskKind kind, double p, double value) {
  RiskEstimate est;
  est.kind = kind;
  est.p = p;
  est.value = value;
  est.std_error = 0;
  est.method = RiskMethod::kExact;
  est.samples = 0;
  return est;
}

// A Monte Carlo run whose sample variance vanished carries no statistical
// uncertainty; report it as exact to keep std_error == 0 <=> exact.
RiskEstimate mc_estimate(RiskKind kind, double p, double value, double std_error,
                         std::int64_t samples) {
  RiskEstimate est;
  est.kind = kind;
  est.p = p;
  est.value = value;
  est.std_error = std_error;
  est.method = std_error == 0 ? RiskMethod::kExact : RiskMethod::kMonteCarlo;
  est.samples = samples;
  return est;
}

RiskEstimate or_linear_impl(const Problem& problem, const Eigen::VectorXd& a, double p,
                            std::int64_t count, std::uint64_t seed, bool allow_exact) {
  check_common(p, count);
  const XReal worst = gwce(problem, a);
  if (worst.is_infinite()) return exact_estimate(RiskKind::kOr, p, kInf);
  const double h = worst.value();
  const double s = problem.noise.linear_scale(a);

  if (allow_exact) {
    if (s == 0) return exact_estimate(RiskKind::kOr, p, h);
    if (problem.noise.base_kind() == NoiseKind::kRademacher) {
      return exact_estimate(RiskKind::kOr, p, h + s);
    }
    if (problem.noise.scalar_gaussian()) {
      const double m1 = s * std::sqrt(2.0 / std::numbers::pi);
      if (p == 1.0) return exact_estimate(RiskKind::kOr, p, h + m1);
      if (p == 2.0) return exact_estimate(RiskKind::kOr, p, std::sqrt(h * h + 2.0 * h * m1 + s * s));
    }
  }

  const NoiseModel& noise = problem.noise;
  auto eval = [&](std::int64_t i, double* out) {
    Eigen::VectorXd row(noise.dim());
    noise.sample_row(seed, i, row);
    out[0] = power(h + std::abs(a.dot(row)), p);
  };
  BlockedMoments moments = blocked_moments(count, 1, eval);
  const double mean = moments.mean(0);
  return mc_estimate(RiskKind::kOr, p, root(mean, p),
                     root_std_error(mean, moments.mean_std_error(0), p), count);
}

RiskEstimate se_linear_impl(const Problem& problem, const Eigen::VectorXd& a, double p,
                            std::int64_t count, std::uint64_t seed, bool allow_exact) {
  check_common(p, count);
  const XReal worst = gwce(problem, a);
  if (worst.is_infinite()) return exact_estimate(RiskKind::kSe, p, kInf);
  const double h = worst.value();
  const double s = problem.noise.linear_scale(a);

  if (allow_exact) {
    if (s == 0) return exact_estimate(RiskKind::kSe, p, h);
    if (p == 2.0) return exact_estimate(RiskKind::kSe, p, std::sqrt(h * h + s * s));
    if (problem.noise.base_kind() == NoiseKind::kRademacher) {
      const double m = 0.5 * (power(std::abs(h - s), p) + power(h + s, p));
      return exact_estimate(RiskKind::kSe, p, root(m, p));
    }
    if (problem.noise.scalar_gaussian() && p == 1.0) {
      const double z = h / (s * std::sqrt(2.0));
      const double value = s * std::sqrt(2.0 / std::numbers::pi) * std::exp(-z * z) + h * std::erf(z);
      return exact_estimate(RiskKind::kSe, p, value);
    }
  }

  // E |h t - <a, e>|^p on a 65-point t-grid over [-1, 1], all points sharing
  // one noise stream; each per-draw profile is convex in t, so the empirical
  // maximum sits at a grid point (in fact at t = +-1).
  constexpr int kGrid = 65;
  const NoiseModel& noise = problem.noise;
  auto eval = [&](std::int64_t i, double* out) {
    Eigen::VectorXd row(noise.dim());
    noise.sample_row(seed, i, row);
    const double z = a.dot(row);
    for (int j = 0; j < kGrid; ++j) {
      const double t = -1.0 + j / 32.0;
      out[j] = power(std::abs(h * t - z), p);
    }
  };
  BlockedMoments moments = blocked_moments(count, kGrid, eval);
  int arg = 0;
  double best = -1;
  for (int j = 0; j < kGrid; ++j) {
    const double m = moments.mean(j);
    if (m > best) {
      best = m;
      arg = j;
    }
  }
  return mc_estimate(RiskKind::kSe, p, root(best, p),
                     root_std_error(best, moments.mean_std_error(arg), p), count);
}

double opaque_sup(double b, double c, double tau, const OpaqueMap& map, double xi) {
  constexpr int kGrid = 4097;
  Eigen::VectorXd y(1);
  double best = 0;
  for (int k = 0; k < kGrid; ++k) {
    const double f = -tau + 2.0 * tau * k / (kGrid - 1);
    y[0] = c * f + xi;
    best = std::max(best, std::abs(b * f - map(y)));
  }
  return best;
}

double piecewise_sup(double b, double c, double tau, const PiecewiseAffine1D& map, double xi) {
  const auto error_at = [&](double f, double mapped) { return std::abs(b * f - mapped); };
  double best = std::max(error_at(-tau, map(c * (-tau) + xi)), error_at(tau, map(c * tau + xi)));
  if (c != 0) {
    const auto& bps = map.breakpoints();
    const auto& pieces = map.pieces();
    const auto& values = map.breakpoint_values();
    for (std::size_t j = 0; j < bps.size(); ++j) {
      const double f = (bps[j] - xi) / c;
      if (f < -tau || f > tau) continue;
      best = std::max(best, error_at(f, values[j]));
      best = std::max(best, error_at(f, pieces[j](bps[j])));
      best = std::max(best, error_at(f, pieces[j + 1](bps[j])));
    }
  }
  return best;
}

void check_1d_setting(double b, double c, double tau, const NoiseModel& noise) {
  if (!std::isfinite(b) || !std::isfinite(c)) {
    throw std::invalid_argument("risk: b and c must be finite");
  }
  if (!(tau > 0) || !std::isfinite(tau)) throw std::invalid_argument("risk: tau must be positive");
  if (noise.dim() != 1) throw std::invalid_argument("risk: the 1-d setting needs scalar noise");
}

double map_value_1d(const RecoveryMap& map, double y) {
  if (const auto* lin = std::get_if<LinearMap>(&map)) {
    if (lin->a.size() != 1) throw std::invalid_argument("risk: linear map must be scalar here");
    return lin->a[0] * y;
  }
  if (const auto* pw = std::get_if<PiecewiseAffine1D>(&map)) return (*pw)(y);
  Eigen::VectorXd v(1);
  v[0] = y;
  return std::get<OpaqueMap>(map)(v);
}

}  // namespace

std::int64_t default_samples(double p) { return p <= 2.0 ? 100000 : 400000; }

PiecewiseAffine1D::PiecewiseAffine1D(std::vector<double> breakpoints,
                                     std::vector<AffinePiece> pieces,
                                     std::vector<double> breakpoint_values)
    : breakpoints_(std::move(breakpoints)),
      pieces_(std::move(pieces)),
      breakpoint_values_(std::move(breakpoint_values)) {
  if (pieces_.size() != breakpoints_.size() + 1) {
    throw std::invalid_argument("PiecewiseAffine1D: need one more piece than breakpoints");
  }
  if (breakpoint_values_.size() != breakpoints_.size()) {
    throw std::invalid_argument("PiecewiseAffine1D: need one value per breakpoint");
  }
  for (std::size_t j = 0; j < breakpoints_.size(); ++j) {
    if (!std::isfinite(breakpoints_[j])) {
      throw std::invalid_argument("PiecewiseAffine1D: breakpoints must be finite");
    }
    if (j > 0 && !(breakpoints_[j - 1] < breakpoints_[j])) {
      throw std::invalid_argument("PiecewiseAffine1D: breakpoints must be strictly increasing");
    }
  }
}

double PiecewiseAffine1D::operator()(double y) const {
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), y);
  const std::size_t idx = static_cast<std::size_t>(it - breakpoints_.begin());
  if (idx > 0 && breakpoints_[idx - 1] == y) return breakpoint_values_[idx - 1];
  return pieces_[idx](y);
}

XReal gwce(const Problem& problem, const Eigen::VectorXd& a) {
  if (a.size() != problem.m()) {
    throw std::invalid_argument("gwce: a must have one entry per measurement");
  }
  return support_value(problem.set, (problem.q - problem.lambda.transpose() * a).eval());
}

RiskEstimate ge_or_linear(const Problem& problem, const Eigen::VectorXd& a, double p,
                          std::int64_t count, std::uint64_t seed) {
  return or_linear_impl(problem, a, p, count, seed, true);
}

RiskEstimate ge_se_linear(const Problem& problem, const Eigen::VectorXd& a, double p,
                          std::int64_t count, std::uint64_t seed) {
  return se_linear_impl(problem, a, p, count, seed, true);
}

RiskEstimate ge_or_general_1d(double b, double c, double tau, const NoiseModel& noise,
                              const RecoveryMap& map, double p, std::int64_t count,
                              std::uint64_t seed) {
  check_common(p, count);
  check_1d_setting(b, c, tau, noise);
  if (noise.base_kind() == NoiseKind::kRademacher) {
    const double sp = power(detail::sup_abs_error_1d(b, c, tau, map, noise.sigma()), p);
    const double sm = power(detail::sup_abs_error_1d(b, c, tau, map, -noise.sigma()), p);
    return exact_estimate(RiskKind::kOr, p, root(0.5 * (sp + sm), p));
  }
  if (noise.sigma() == 0) {
    return exact_estimate(RiskKind::kOr, p, detail::sup_abs_error_1d(b, c, tau, map, 0.0));
  }
  auto eval = [&](std::int64_t i, double* out) {
    Eigen::VectorXd row(1);
    noise.sample_row(seed, i, row);
    out[0] = power(detail::sup_abs_error_1d(b, c, tau, map, row[0]), p);
  };
  BlockedMoments moments = blocked_moments(count, 1, eval);
  const double mean = moments.mean(0);
  return mc_estimate(RiskKind::kOr, p, root(mean, p),
                     root_std_error(mean, moments.mean_std_error(0), p), count);
}

RiskEstimate ge_se_general_1d(double b, double c, double tau, const NoiseModel& noise,
                              const RecoveryMap& map, double p, std::int64_t count,
                              std::uint64_t seed) {
  check_common(p, count);
  check_1d_setting(b, c, tau, noise);
  constexpr int kGrid = 129;
  const auto grid_point = [&](int j) { return -tau + 2.0 * tau * j / (kGrid - 1); };

  if (noise.base_kind() == NoiseKind::kRademacher || noise.sigma() == 0) {
    double best = 0;
    for (int j = 0; j < kGrid; ++j) {
      const double f = grid_point(j);
      double m;
      if (noise.sigma() == 0) {
        m = power(std::abs(b * f - map_value_1d(map, c * f)), p);
      } else {
        const double ep = power(std::abs(b * f - map_value_1d(map, c * f + noise.sigma())), p);
        const double em = power(std::abs(b * f - map_value_1d(map, c * f - noise.sigma())), p);
        m = 0.5 * (ep + em);
      }
      best = std::max(best, m);
    }
    return exact_estimate(RiskKind::kSe, p, root(best, p));
  }

  auto eval = [&](std::int64_t i, double* out) {
    Eigen::VectorXd row(1);
    noise.sample_row(seed, i, row);
    for (int j = 0; j < kGrid; ++j) {
      const double f = grid_point(j);
      out[j] = power(std::abs(b * f - map_value_1d(map, c * f + row[0])), p);
    }
  };
  BlockedMoments moments = blocked_moments(count, kGrid, eval);
  int arg = 0;
  double best = -1;
  for (int j = 0; j < kGrid; ++j) {
    const double m = moments.mean(j);
    if (m > best) {
      best = m;
      arg = j;
    }
  }
  return mc_estimate(RiskKind::kSe, p, root(best, p),
                     root_std_error(best, moments.mean_std_error(arg), p), count);
}

namespace detail {

RiskEstimate ge_or_linear_mc(const Problem& problem, const Eigen::VectorXd& a, double p,
                             std::int64_t count, std::uint64_t seed) {
  return or_linear_impl(problem, a, p, count, seed, false);
}

RiskEstimate ge_se_linear_mc(const Problem& problem, const Eigen::VectorXd& a, double p,
                             std::int64_t count, std::uint64_t seed) {
  return se_linear_impl(problem, a, p, count, seed, false);
}

double sup_abs_error_1d(double b, double c, double tau, const RecoveryMap& map, double xi) {
  if (const auto* lin = std::get_if<LinearMap>(&map)) {
    if (lin->a.size() != 1) throw std::invalid_argument("risk: linear map must be scalar here");
    const double a0 = lin->a[0];
    const double hi = std::abs(b * tau - a0 * (c * tau + xi));
    const double lo = std::abs(-b * tau - a0 * (-c * tau + xi));
    return std::max(hi, lo);
  }
  if (const auto* pw = std::get_if<PiecewiseAffine1D>(&map)) {
    return piecewise_sup(b, c, tau, *pw, xi);
  }
  return opaque_sup(b, c, tau, std::get<OpaqueMap>(map), xi);
}

}  // namespace detail

}  // namespace recovery
