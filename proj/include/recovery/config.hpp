#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "recovery/design.hpp"
#include "recovery/noise.hpp"
#include "recovery/problem.hpp"
#include "recovery/risk.hpp"
#include "recovery/verify.hpp"

namespace recovery {

// Raised for malformed configuration input; messages carry the field path.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  Problem problem;
  SolverOptions solver;           // defaults: tol 1e-6, max_iter 5000
  std::int64_t samples = 100000;  // mc.samples
  std::uint64_t seed = 0;         // mc.seed
  nlohmann::json resolved;        // the config with every default made explicit
};

// Strict parser: unknown keys, wrong types and inconsistent dimensions are
// rejected with the offending field path in the message.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

nlohmann::json to_json(const Eigen::VectorXd& v);
nlohmann::json to_json(const Eigen::MatrixXd& m);
nlohmann::json to_json(const RiskEstimate& est);
nlohmann::json to_json(const DesignReport& report);
nlohmann::json to_json(const SandwichReport& report);
nlohmann::json to_json(const ComparisonCheck& check);
nlohmann::json to_json(const ComparisonReport& report);
nlohmann::json to_json(const BatteryResult& result);
nlohmann::json to_json(const BorellCheck& check);
nlohmann::json to_json(const DensityDiagnostics& diag);

// One row per executed check: problem_id,check,value,bound,slack,pass.
std::string battery_csv(const BatteryResult& result);

}  // namespace recovery
