#pragma once

#include <optional>
#include <string>
#include <vector>

#include "recovery/design.hpp"
#include "recovery/risk.hpp"

namespace recovery {

// Statistical slack: estimates must respect bounds up to 3 standard errors.
inline constexpr double kSigmaSlack = 3.0;
// Analytic slack for exact identities, relative to 1 + scale.
inline constexpr double kAnalyticRtol = 1e-6;

struct SandwichReport {
  std::string problem_id;
  DesignReport design;
  double null_error = 0;
  RiskEstimate ge_or_1;
  double lower = 0;  // kappa1 * null_error
  double upper = 0;  // null_error
  double slack_lower = 0;  // ge - (lower - 3 SE)
  double slack_upper = 0;  // (upper + 3 SE) - ge
  bool applicable = true;
  std::string reason;  // set when not applicable
  bool pass = true;
};

// Designs the linear map, computes the null error and checks
// kappa1 N - 3 SE <= ge_or_1(design) <= N + 3 SE. Requires log-concave noise
// (the lower bound's density hypotheses); otherwise marked not applicable.
SandwichReport verify_sandwich(const Problem& problem, const std::string& problem_id,
                               std::int64_t samples, std::uint64_t seed,
                               const SolverOptions& options = {});

struct ComparisonCheck {
  std::string name;
  double p = 0;  // left exponent (0 when unused)
  double q = 0;  // right exponent
  double lhs = 0;
  double rhs = 0;
  double slack = 0;      // rhs - lhs
  double std_error = 0;  // combined SE of the two sides
  bool applicable = true;
  std::string reason;
  bool pass = true;
};

struct ComparisonReport {
  std::string problem_id;
  std::vector<ComparisonCheck> checks;
  bool all_pass = true;
};

// Shared-seed comparisons for the map <a, .>: se <= or per exponent,
// monotonicity in p for both risks, or_q <= 2 se_q, and (log-concave noise
// only) se_q <= 2 e q se_1.
ComparisonReport verify_comparisons(const Problem& problem, const Eigen::VectorXd& a,
                                    const std::vector<double>& qs, std::int64_t samples,
                                    std::uint64_t seed);

struct BatteryItem {
  std::string id;
  Problem problem;
};

struct BatteryConfig {
  std::vector<BatteryItem> items;
  std::int64_t samples = 100000;
  std::uint64_t seed = 0;
  std::vector<double> qs = {1, 2, 4};
  SolverOptions solver{1e-6, 60000};
  bool run_sandwich = true;
  bool run_comparisons = true;
};

// Ellipsoid, box and approximability sets crossed with Gaussian, Laplace and
// uniform noise at sigma in {0.1, 1, 10}; dimensions cycle with n, m <= 6.
// Instances are fixed; only the Monte Carlo streams depend on the seed.
BatteryConfig default_battery();

struct BatteryItemResult {
  std::string id;
  std::optional<SandwichReport> sandwich;
  std::optional<ComparisonReport> comparisons;
  bool pass = true;
};

struct BatteryResult {
  std::vector<BatteryItemResult> items;
  int checks_total = 0;
  int checks_failed = 0;
  int not_applicable = 0;
  bool pass = true;
};

// Runs the battery with per-item seeds hashed from the battery seed and the
// item index. Deterministic for a fixed config, independent of worker count.
BatteryResult run_battery(const BatteryConfig& config);

}  // namespace recovery
