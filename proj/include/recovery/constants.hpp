#pragma once

#include <cmath>
#include <numbers>

namespace recovery::constants {

// All constants are evaluated from their defining expressions; none are
// pinned decimals.

// Universal lower-bound factor for the one-dimensional setting:
// alpha = delta * gamma^2 / 2 = 1 / (100 sqrt(3) e^4).
inline const double kAlpha = 1.0 / (100.0 * std::numbers::sqrt3 * std::exp(4.0));

// Density floor level: min density on the central window is >= kDelta / sigma.
inline const double kDelta = 1.0 / (2.0 * std::numbers::sqrt3 * std::exp(2.0));

// Central window half-width, in units of sigma.
inline const double kGamma = 1.0 / (5.0 * std::numbers::e);

// Sandwich constant: kappa1 * null_error <= ge_or_1 of every map.
inline const double kKappa1 = kAlpha;

// Borell reverse-moment constant for log-concave distributions:
// (E |xi|^q)^(1/q) <= C (q/p) (E |xi|^p)^(1/p) with C = e.
inline const double kBorellC = std::numbers::e;

// Hensley-type bracket for a symmetric log-concave density with variance sigma^2.
inline double hensley_lower(double sigma) {
  return 1.0 / (2.0 * std::numbers::sqrt3 * std::numbers::e * sigma);
}
inline double hensley_upper(double sigma) { return 3.0 / sigma; }

// Two-point comparisons: ge_or_q <= C_q ge_se_q and ge_se_q <= D_q ge_se_1.
inline double comparison_cq(double /*q*/) { return 2.0; }
inline double comparison_dq(double q) { return 2.0 * kBorellC * q; }

}  // namespace recovery::constants
