#include "recovery/oned.hpp"

#include <cmath>
#include <stdexcept>

#include "recovery/design.hpp"

namespace recovery {

void validate(const SimplestSetting& s) {
  if (!std::isfinite(s.b) || !std::isfinite(s.c) || !std::isfinite(s.tau) ||
      !std::isfinite(s.sigma)) {
    throw std::invalid_argument("SimplestSetting: all fields must be finite");
  }
  if (s.c == 0) throw std::invalid_argument("SimplestSetting: c must be nonzero");
  if (!(s.tau > 0)) throw std::invalid_argument("SimplestSetting: tau must be positive");
  if (s.sigma < 0) throw std::invalid_argument("SimplestSetting: sigma must be nonnegative");
}

AllMapsLowerBound lower_bound_all_maps(const SimplestSetting& s) {
  validate(s);
  AllMapsLowerBound bound;
  bound.value = constants::kAlpha * (std::abs(s.b) / std::abs(s.c)) *
                std::min(s.sigma, std::abs(s.c) * s.tau);
  bound.vacuous = s.sigma == 0;
  return bound;
}

PiecewiseAffine1D rademacher_optimal_map(const SimplestSetting& s) {
  validate(s);
  if (!(s.sigma > std::abs(s.c) * s.tau)) {
    throw std::invalid_argument("rademacher_optimal_map: needs sigma > |c| tau");
  }
  const double slope = s.b / s.c;
  // y = c f + sigma > 0 and y = c f - sigma < 0 for every |f| <= tau, so
  // inverting the visible atom recovers b f exactly on both branches.
  return PiecewiseAffine1D({0.0},
                           {AffinePiece{slope, slope * s.sigma}, AffinePiece{slope, -slope * s.sigma}},
                           {0.0});
}

double rademacher_lower_bound(const SimplestSetting& s) {
  validate(s);
  if (s.sigma > std::abs(s.c) * s.tau) {
    throw std::invalid_argument("rademacher_lower_bound: needs sigma <= |c| tau");
  }
  return std::abs(s.b) * s.sigma / (std::abs(s.c) * std::sqrt(2.0));
}

double linearity_failure_ratio(const SimplestSetting& s) {
  validate(s);
  if (!(s.sigma > std::abs(s.c) * s.tau)) {
    throw std::invalid_argument("linearity_failure_ratio: needs sigma > |c| tau");
  }
  return oned_optimal_linear(s.b, s.c, s.tau, s.sigma).value;
}

}  // namespace recovery
