#pragma once

#include "recovery/constants.hpp"
#include "recovery/risk.hpp"

namespace recovery {

// n = m = 1: estimate Q(f) = b f from y = c f + xi, |f| <= tau.
struct SimplestSetting {
  double b = 0;
  double c = 0;      // must be nonzero
  double tau = 0;    // must be positive
  double sigma = 0;  // noise level, nonnegative
};

void validate(const SimplestSetting& s);

struct AllMapsLowerBound {
  double value = 0;
  bool vacuous = false;  // sigma == 0: the bound degenerates to 0
};

// ge_or_1(map) >= alpha (|b| / |c|) min(sigma, |c| tau) for every map, every
// symmetric log-concave noise with variance sigma^2.
AllMapsLowerBound lower_bound_all_maps(const SimplestSetting& s);

// Rademacher noise, sigma > |c| tau: the two-piece map y -> (b/c)(y -+ sigma)
// (minus for y > 0, plus for y < 0, value 0 at y = 0) recovers b f exactly
// from both atoms, so its ge_or_2 is exactly zero.
PiecewiseAffine1D rademacher_optimal_map(const SimplestSetting& s);

// Rademacher noise, sigma <= |c| tau: every map has
// ge_or_2 >= |b| sigma / (|c| sqrt(2)).
double rademacher_lower_bound(const SimplestSetting& s);

// sigma > |c| tau: the best linear map still has ge_se_2 =
// |b| tau sigma / sqrt(sigma^2 + c^2 tau^2) > 0, while the optimal nonlinear
// map has zero risk; the linear/nonlinear ratio is unbounded. Returns the
// linear value.
double linearity_failure_ratio(const SimplestSetting& s);

}  // namespace recovery
