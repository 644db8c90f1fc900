#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace recovery {

// Counter-based generator: every draw is a pure function of (seed, stream, index),
// so partitioning the index space across workers reproduces the serial stream exactly.
// The mixer is the SplitMix64 finalizer applied to a chained key.

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ull;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t k) {
  return mix64(h ^ (k + kGoldenGamma));
}

// One 64-bit word per (seed, stream, index).
inline constexpr std::uint64_t counter_word(std::uint64_t seed, std::uint64_t stream,
                                            std::uint64_t index) {
  std::uint64_t h = mix64(seed + kGoldenGamma);
  h = hash_combine(h, stream);
  h = hash_combine(h, index);
  return h;
}

// Uniform draw strictly inside (0, 1): (w >> 11) has 53 bits, offset by half a lattice step.
inline constexpr double unit_open(std::uint64_t w) {
  return (static_cast<double>(w >> 11) + 0.5) * 0x1.0p-53;
}

inline double uniform_open(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return unit_open(counter_word(seed, stream, index));
}

// Standard normal quantile: Acklam's rational approximation polished by one
// Halley step against erfc, accurate to a few ulps across (0, 1).
inline double normal_quantile(double u) {
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double plow = 0.02425;

  double x;
  if (u < plow) {
    double r = std::sqrt(-2.0 * std::log(u));
    x = (((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
        ((((d[0] * r + d[1]) * r + d[2]) * r + d[3]) * r + 1.0);
  } else if (u <= 1.0 - plow) {
    double r = u - 0.5;
    double t = r * r;
    x = (((((a[0] * t + a[1]) * t + a[2]) * t + a[3]) * t + a[4]) * t + a[5]) * r /
        (((((b[0] * t + b[1]) * t + b[2]) * t + b[3]) * t + b[4]) * t + 1.0);
  } else {
    double r = std::sqrt(-2.0 * std::log(1.0 - u));
    x = -(((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
        ((((d[0] * r + d[1]) * r + d[2]) * r + d[3]) * r + 1.0);
  }

  // Halley refinement: e = Phi(x) - u.
  double e = 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0) - u;
  double w = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - w / (1.0 + 0.5 * x * w);
}

// Laplace quantile with scale b (variance 2 b^2).
inline double laplace_quantile(double u, double b) {
  return u < 0.5 ? b * std::log(2.0 * u) : -b * std::log(2.0 * (1.0 - u));
}

}  // namespace recovery
