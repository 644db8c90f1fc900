#include "recovery/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "recovery/constants.hpp"
#include "recovery/rng.hpp"

namespace recovery {

namespace {

double analytic_slack(double scale) { return kAnalyticRtol * (1.0 + std::abs(scale)); }

ComparisonCheck make_check(std::string name, double p, double q, double lhs, double rhs,
                           double se) {
  ComparisonCheck check;
  check.name = std::move(name);
  check.p = p;
  check.q = q;
  check.lhs = lhs;
  check.rhs = rhs;
  check.slack = rhs - lhs;
  check.std_error = se;
  check.pass = lhs <= rhs + kSigmaSlack * se + analytic_slack(std::max(std::abs(lhs), std::abs(rhs)));
  return check;
}

ComparisonCheck skipped_check(std::string name, double p, double q, std::string reason) {
  ComparisonCheck check;
  check.name = std::move(name);
  check.p = p;
  check.q = q;
  check.applicable = false;
  check.reason = std::move(reason);
  check.pass = true;
  return check;
}

double combined_se(const RiskEstimate& x, const RiskEstimate& y, double y_scale = 1.0) {
  return std::sqrt(x.std_error * x.std_error + y_scale * y_scale * y.std_error * y.std_error);
}

std::string format_sigma(double sigma) {
  char buf[32];
  if (sigma == static_cast<std::int64_t>(sigma)) {
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(sigma));
  } else {
    std::snprintf(buf, sizeof(buf), "%g", sigma);
  }
  return buf;
}

}  // namespace

SandwichReport verify_sandwich(const Problem& problem, const std::string& problem_id,
                               std::int64_t samples, std::uint64_t seed,
                               const SolverOptions& options) {
  SandwichReport report;
  report.problem_id = problem_id;
  report.design = design_linear(problem, options);
  report.null_error = report.design.null_error;
  report.ge_or_1 = ge_or_linear(problem, report.design.a_star, 1.0, samples, seed);

  const double n0 = report.null_error;
  report.lower = constants::kKappa1 * n0;
  report.upper = n0;
  const double spread = kSigmaSlack * report.ge_or_1.std_error;
  report.slack_lower = report.ge_or_1.value - (report.lower - spread);
  report.slack_upper = (report.upper + spread) - report.ge_or_1.value;

  if (!problem.noise.is_log_concave()) {
    report.applicable = false;
    report.reason = "noise is not log-concave; the lower bound's density floor fails";
    report.pass = true;
    return report;
  }

  const double eps = analytic_slack(n0);
  report.pass = report.slack_lower >= -eps && report.slack_upper >= -eps;
  return report;
}

ComparisonReport verify_comparisons(const Problem& problem, const Eigen::VectorXd& a,
                                    const std::vector<double>& qs, std::int64_t samples,
                                    std::uint64_t seed) {
  if (qs.empty()) throw std::invalid_argument("verify_comparisons: need at least one exponent");
  std::vector<double> exps = qs;
  std::sort(exps.begin(), exps.end());
  exps.erase(std::unique(exps.begin(), exps.end()), exps.end());
  if (!(exps.front() >= 1.0)) {
    throw std::invalid_argument("verify_comparisons: exponents must be >= 1");
  }

  ComparisonReport report;
  // Every estimate shares the one seed, so the Monte Carlo paths see common
  // random numbers and the pointwise inequalities transfer to the estimates.
  std::map<double, RiskEstimate> se_of, or_of;
  for (double r : exps) {
    se_of[r] = ge_se_linear(problem, a, r, samples, seed);
    or_of[r] = ge_or_linear(problem, a, r, samples, seed);
  }
  RiskEstimate se1 = se_of.count(1.0) ? se_of[1.0] : ge_se_linear(problem, a, 1.0, samples, seed);

  for (double r : exps) {
    const auto& se = se_of[r];
    const auto& orr = or_of[r];
    report.checks.push_back(
        make_check("se_le_or", r, r, se.value, orr.value, combined_se(se, orr)));
  }
  for (std::size_t i = 0; i + 1 < exps.size(); ++i) {
    const auto& lo = or_of[exps[i]];
    const auto& hi = or_of[exps[i + 1]];
    report.checks.push_back(make_check("or_monotone", exps[i], exps[i + 1], lo.value, hi.value,
                                       combined_se(lo, hi)));
  }
  for (std::size_t i = 0; i + 1 < exps.size(); ++i) {
    const auto& lo = se_of[exps[i]];
    const auto& hi = se_of[exps[i + 1]];
    report.checks.push_back(make_check("se_monotone", exps[i], exps[i + 1], lo.value, hi.value,
                                       combined_se(lo, hi)));
  }
  for (double r : exps) {
    const auto& orr = or_of[r];
    const auto& se = se_of[r];
    const double cq = constants::comparison_cq(r);
    report.checks.push_back(
        make_check("or_le_2se", r, r, orr.value, cq * se.value, combined_se(orr, se, cq)));
  }
  for (double r : exps) {
    if (!problem.noise.is_log_concave()) {
      report.checks.push_back(
          skipped_check("se_q_le_2eq_se1", 1.0, r, "noise is not log-concave"));
      continue;
    }
    const auto& se = se_of[r];
    const double dq = constants::comparison_dq(r);
    report.checks.push_back(
        make_check("se_q_le_2eq_se1", 1.0, r, se.value, dq * se1.value, combined_se(se, se1, dq)));
  }

  report.all_pass = std::all_of(report.checks.begin(), report.checks.end(),
                                [](const ComparisonCheck& c) { return c.pass; });
  return report;
}

BatteryConfig default_battery() {
  // Instances are pinned by their own stream constant; the battery seed only
  // moves the Monte Carlo noise.
  constexpr std::uint64_t kInstanceSeed = 0x7ec0be5e5ull;
  constexpr int kPairs[9][2] = {{2, 2}, {3, 2}, {4, 3}, {5, 3}, {6, 4},
                                {3, 3}, {4, 2}, {5, 4}, {6, 3}};
  const char* set_names[3] = {"ellipsoid", "box", "approximability"};
  const char* noise_names[3] = {"gaussian", "laplace", "uniform"};
  const double sigmas[3] = {0.1, 1.0, 10.0};

  BatteryConfig config;
  int index = 0;
  for (int si = 0; si < 3; ++si) {
    for (int ni = 0; ni < 3; ++ni) {
      for (int gi = 0; gi < 3; ++gi, ++index) {
        const Eigen::Index n = kPairs[index % 9][0];
        const Eigen::Index m = kPairs[index % 9][1];
        const std::uint64_t base = static_cast<std::uint64_t>(index) * 16;
        const auto uniform = [&](std::uint64_t stream, std::uint64_t t) {
          return uniform_open(kInstanceSeed, base + stream, t);
        };

        Eigen::MatrixXd lambda(m, n);
        for (Eigen::Index i = 0; i < m; ++i) {
          for (Eigen::Index j = 0; j < n; ++j) {
            lambda(i, j) = 2.0 * uniform(0, static_cast<std::uint64_t>(i * n + j)) - 1.0;
          }
        }
        Eigen::VectorXd q(n);
        for (Eigen::Index j = 0; j < n; ++j) {
          q[j] = 2.0 * uniform(1, static_cast<std::uint64_t>(j)) - 1.0;
        }
        if (q.lpNorm<Eigen::Infinity>() < 0.1) q[0] += 1.0;

        ModelSet set = Box(n, 1.0);
        if (si == 0) {
          Eigen::MatrixXd shape(n, n);
          for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
              shape(i, j) = 2.0 * uniform(2, static_cast<std::uint64_t>(i * n + j)) - 1.0;
            }
          }
          shape *= 0.3 / std::sqrt(static_cast<double>(n));
          shape += Eigen::MatrixXd::Identity(n, n);
          set = Ellipsoid(shape);
        } else if (si == 1) {
          set = Box(n, 0.5 + uniform(3, 0));
        } else {
          const Eigen::Index k = std::max<Eigen::Index>(1, n / 2);
          Eigen::MatrixXd g(n, k);
          for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < k; ++j) {
              g(i, j) = normal_quantile(uniform(4, static_cast<std::uint64_t>(i * k + j)));
            }
          }
          Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
          Eigen::MatrixXd thin_q = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
          set = Approximability(thin_q, 0.3 + 0.4 * uniform(5, 0));
        }

        NoiseModel noise = NoiseModel::gaussian(sigmas[gi], m);
        if (ni == 1) noise = NoiseModel::laplace(sigmas[gi], m);
        if (ni == 2) noise = NoiseModel::uniform(sigmas[gi], m);

        char id[96];
        std::snprintf(id, sizeof(id), "i%02d-%s-%s-s%s-n%dm%d", index, set_names[si],
                      noise_names[ni], format_sigma(sigmas[gi]).c_str(), static_cast<int>(n),
                      static_cast<int>(m));
        config.items.push_back(BatteryItem{id, make_problem(lambda, q, set, noise)});
      }
    }
  }
  return config;
}

BatteryResult run_battery(const BatteryConfig& config) {
  BatteryResult result;
  const std::uint64_t root = mix64(config.seed + kGoldenGamma);
  for (std::size_t idx = 0; idx < config.items.size(); ++idx) {
    const BatteryItem& item = config.items[idx];
    const std::uint64_t item_seed = hash_combine(root, static_cast<std::uint64_t>(idx));

    BatteryItemResult row;
    row.id = item.id;
    Eigen::VectorXd a;
    if (config.run_sandwich) {
      row.sandwich =
          verify_sandwich(item.problem, item.id, config.samples, item_seed, config.solver);
      a = row.sandwich->design.a_star;
      ++result.checks_total;
      if (!row.sandwich->applicable) {
        --result.checks_total;
        ++result.not_applicable;
      } else if (!row.sandwich->pass) {
        ++result.checks_failed;
      }
      row.pass = row.sandwich->pass;
    }
    if (config.run_comparisons) {
      if (a.size() == 0) a = design_linear(item.problem, config.solver).a_star;
      row.comparisons =
          verify_comparisons(item.problem, a, config.qs, config.samples, item_seed);
      row.comparisons->problem_id = item.id;
      for (const ComparisonCheck& check : row.comparisons->checks) {
        if (!check.applicable) {
          ++result.not_applicable;
        } else {
          ++result.checks_total;
          if (!check.pass) ++result.checks_failed;
        }
      }
      row.pass = row.pass && row.comparisons->all_pass;
    }
    result.items.push_back(std::move(row));
  }
  result.pass = result.checks_failed == 0;
  return result;
}

}  // namespace recovery
