#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "recovery/extended_real.hpp"
#include "recovery/problem.hpp"

namespace recovery {

enum class RiskKind { kSe, kOr };
enum class RiskMethod { kExact, kMonteCarlo };

struct RiskEstimate {
  RiskKind kind = RiskKind::kSe;
  double p = 2;
  double value = 0;
  double std_error = 0;  // 0 exactly when method == kExact
  RiskMethod method = RiskMethod::kMonteCarlo;
  std::int64_t samples = 0;
};

// Default Monte Carlo sample counts: 1e5 for p <= 2, 4e5 for larger p.
std::int64_t default_samples(double p);

struct LinearMap {
  Eigen::VectorXd a;
};

struct AffinePiece {
  double slope = 0;
  double intercept = 0;
  double operator()(double y) const { return slope * y + intercept; }
};

// Continuous pieces are not required; the value at each breakpoint is stored
// explicitly and the one-sided limits of the adjacent pieces are used as
// candidates in sup computations.
class PiecewiseAffine1D {
 public:
  PiecewiseAffine1D(std::vector<double> breakpoints, std::vector<AffinePiece> pieces,
                    std::vector<double> breakpoint_values);

  double operator()(double y) const;

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<AffinePiece>& pieces() const { return pieces_; }
  const std::vector<double>& breakpoint_values() const { return breakpoint_values_; }

 private:
  std::vector<double> breakpoints_;
  std::vector<AffinePiece> pieces_;
  std::vector<double> breakpoint_values_;
};

// Arbitrary measurable map with an evaluator contract (m-vector to real).
using OpaqueMap = std::function<double(const Eigen::VectorXd&)>;

using RecoveryMap = std::variant<LinearMap, PiecewiseAffine1D, OpaqueMap>;

// Noiseless worst-case error of <a, .>: sup_{f in K} |<q, f> - <a, lambda f>|.
XReal gwce(const Problem& problem, const Eigen::VectorXd& a);

// (E sup_f |...|^p)^(1/p) of the linear map <a, .>. Uses the identity
// sup_f |<q - lambda' a, f> - <a, e>| = gwce + |<a, e>|; exact for Gaussian
// p in {1, 2}, for degenerate <a, e>, and for Rademacher noise.
RiskEstimate ge_or_linear(const Problem& problem, const Eigen::VectorXd& a, double p,
                          std::int64_t count, std::uint64_t seed);

// (sup_f E |...|^p)^(1/p) of the linear map. p = 2 is exact for every model
// (sqrt(gwce^2 + sigma^2 |M' a|^2)); Gaussian p = 1 uses the folded-normal
// mean; otherwise Monte Carlo on a 65-point grid over the segment
// f = t f*, t in [-1, 1], with common random numbers.
RiskEstimate ge_se_linear(const Problem& problem, const Eigen::VectorXd& a, double p,
                          std::int64_t count, std::uint64_t seed);

// One-dimensional setting (K = [-tau, tau], y = c f + xi, Q = b f) with an
// arbitrary map. Per draw the inner sup over f is computed exactly for
// piecewise-affine maps (candidate endpoints, breakpoint preimages and
// one-sided limits) and by a 4097-point grid for opaque maps, where the grid
// value is a lower bracket of the sup. Rademacher noise is integrated exactly
// over its two atoms.
RiskEstimate ge_or_general_1d(double b, double c, double tau, const NoiseModel& noise,
                              const RecoveryMap& map, double p, std::int64_t count,
                              std::uint64_t seed);

// Same setting, sup_f E: a 129-point f-grid sharing one noise stream.
RiskEstimate ge_se_general_1d(double b, double c, double tau, const NoiseModel& noise,
                              const RecoveryMap& map, double p, std::int64_t count,
                              std::uint64_t seed);

namespace detail {

// Monte Carlo paths with the exact shortcuts disabled; used to cross-check
// the closed forms in tests.
RiskEstimate ge_or_linear_mc(const Problem& problem, const Eigen::VectorXd& a, double p,
                             std::int64_t count, std::uint64_t seed);
RiskEstimate ge_se_linear_mc(const Problem& problem, const Eigen::VectorXd& a, double p,
                             std::int64_t count, std::uint64_t seed);

// sup_{|f| <= tau} |b f - map(c f + xi)|, exact for piecewise-affine maps.
double sup_abs_error_1d(double b, double c, double tau, const RecoveryMap& map, double xi);

}  // namespace detail

}  // namespace recovery
