#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "oracles.hpp"
#include "recovery/config.hpp"

using namespace recovery;
using nlohmann::json;

namespace {

json base_config() {
  return json{
      {"lambda", {{1.0, 0.2}, {0.0, 0.9}}},
      {"q", {1.0, -0.5}},
      {"set", {{"type", "ellipsoid"}, {"shape", {{1.0, 0.1}, {0.0, 0.8}}}}},
      {"noise", {{"family", "gaussian"}, {"sigma", 0.5}}},
  };
}

json load_schema(const std::string& name) {
  const std::string path = std::string(RECOVERY_SCHEMA_DIR) + "/" + name;
  std::ifstream in(path);
  REQUIRE(in);
  return json::parse(in);
}

void expect_error(const json& config, const std::string& fragment) {
  try {
    parse_run_config(config);
    FAIL_CHECK("expected a config error mentioning \"" << fragment << "\"");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find(fragment) != std::string::npos);
  }
}

}  // namespace

TEST_CASE("defaults are applied and echoed") {
  RunConfig cfg = parse_run_config(base_config());
  CHECK(cfg.samples == 100000);
  CHECK(cfg.seed == 0);
  CHECK(cfg.solver.tol == 1e-6);
  CHECK(cfg.solver.max_iter == 5000);
  CHECK(cfg.problem.n() == 2);
  CHECK(cfg.problem.m() == 2);
  CHECK(cfg.problem.noise.kind() == NoiseKind::kGaussian);

  CHECK(cfg.resolved["solver"]["tol"] == 1e-6);
  CHECK(cfg.resolved["solver"]["max_iter"] == 5000);
  CHECK(cfg.resolved["mc"]["samples"] == 100000);
  CHECK(cfg.resolved["mc"]["seed"] == 0);

  // The resolved form parses back to itself: the echo is a fixed point.
  RunConfig again = parse_run_config(cfg.resolved);
  CHECK(again.resolved == cfg.resolved);
}

TEST_CASE("explicit options override the defaults") {
  json config = base_config();
  config["solver"] = {{"tol", 1e-8}, {"max_iter", 200}};
  config["mc"] = {{"samples", 5000}, {"seed", 42}};
  RunConfig cfg = parse_run_config(config);
  CHECK(cfg.solver.tol == 1e-8);
  CHECK(cfg.solver.max_iter == 200);
  CHECK(cfg.samples == 5000);
  CHECK(cfg.seed == 42);
}

TEST_CASE("every set and noise family parses") {
  json config = base_config();
  config["set"] = {{"type", "box"}, {"tau", 0.7}};
  CHECK(std::holds_alternative<Box>(parse_run_config(config).problem.set));

  config["set"] = {{"type", "approximability"},
                   {"basis", {{1.0}, {0.0}}},
                   {"eps", 0.3}};
  CHECK(std::holds_alternative<Approximability>(parse_run_config(config).problem.set));

  config = base_config();
  config["noise"] = {{"family", "laplace"}, {"sigma", 1.5}};
  CHECK(parse_run_config(config).problem.noise.kind() == NoiseKind::kLaplace);
  config["noise"] = {{"family", "uniform"}, {"sigma", 1.5}};
  CHECK(parse_run_config(config).problem.noise.kind() == NoiseKind::kUniform);

  config["noise"] = {{"family", "correlated"},
                     {"base", "laplace"},
                     {"sigma", 0.8},
                     {"mixing", {{1.0, 0.2}, {0.0, 1.1}}}};
  RunConfig cfg = parse_run_config(config);
  CHECK(cfg.problem.noise.kind() == NoiseKind::kCorrelated);
  CHECK(cfg.problem.noise.base_kind() == NoiseKind::kLaplace);

  // Rademacher needs exactly one measurement row.
  json oned = {{"lambda", {{2.0}}},
               {"q", {1.0}},
               {"set", {{"type", "box"}, {"tau", 1.0}}},
               {"noise", {{"family", "rademacher"}, {"sigma", 1.0}}}};
  CHECK(parse_run_config(oned).problem.noise.kind() == NoiseKind::kRademacher);
}

TEST_CASE("malformed configs fail with the offending path") {
  json config = base_config();
  config["extra"] = 1;
  expect_error(config, "unknown key \"extra\"");

  config = base_config();
  config.erase("q");
  expect_error(config, "missing required key \"q\"");

  config = base_config();
  config["q"] = {1.0, 2.0, 3.0};
  expect_error(config, "\"q\"");

  config = base_config();
  config["lambda"] = {{1.0, 0.2}, {0.0}};
  expect_error(config, "lambda[1]");

  config = base_config();
  config["lambda"][0][1] = "x";
  expect_error(config, "lambda[0][1]");

  config = base_config();
  config["set"]["shape"] = {{1.0}};
  expect_error(config, "set.shape");

  config = base_config();
  config["set"]["type"] = "sphere";
  expect_error(config, "set.type");

  config = base_config();
  config["set"]["tau"] = 1.0;  // tau is not an ellipsoid key
  expect_error(config, "unknown key \"tau\"");

  config = base_config();
  config["noise"]["sigma"] = -1.0;
  expect_error(config, "noise.sigma");

  config = base_config();
  config["noise"] = {{"family", "rademacher"}, {"sigma", 1.0}};  // m = 2
  expect_error(config, "rademacher");

  config = base_config();
  config["noise"] = {{"family", "correlated"}, {"base", "rademacher"}, {"sigma", 1.0},
                     {"mixing", {{1.0, 0.0}, {0.0, 1.0}}}};
  expect_error(config, "noise.base");

  config = base_config();
  config["solver"] = {{"tol", 0.0}};
  expect_error(config, "solver.tol");

  config = base_config();
  config["solver"] = {{"max_iter", 0}};
  expect_error(config, "solver.max_iter");

  config = base_config();
  config["mc"] = {{"samples", -5}};
  expect_error(config, "mc.samples");

  config = base_config();
  config["mc"] = {{"seed", -1}};
  expect_error(config, "mc.seed");

  // Semantic rejection from problem assembly is wrapped as a config error.
  config = base_config();
  config["set"] = {{"type", "approximability"}, {"basis", {{0.0}, {1.0}}}, {"eps", 0.5}};
  config["lambda"] = {{1.0, 0.0}};
  config["q"] = {1.0, 1.0};
  expect_error(config, "config error");
}

TEST_CASE("configs load from disk") {
  const std::string path = "test_config_tmp.json";
  {
    std::ofstream out(path);
    out << base_config().dump(2);
  }
  RunConfig cfg = load_run_config(path);
  CHECK(cfg.problem.n() == 2);
  std::remove(path.c_str());

  {
    std::ofstream out(path);
    out << "{ not json";
  }
  try {
    load_run_config(path);
    FAIL_CHECK("expected a parse failure");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("not valid JSON") != std::string::npos);
  }
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_run_config("does_not_exist.json"), ConfigError);
}

TEST_CASE("emitted documents validate against the published schemas") {
  RunConfig cfg = parse_run_config(base_config());

  json config_schema = load_schema("problem_config.json");
  auto err = oracles::schema_error(config_schema, cfg.resolved);
  CHECK_MESSAGE(!err, err.value_or(""));

  DesignReport design = design_linear(cfg.problem, cfg.solver);
  json design_schema = load_schema("design_report.json");
  err = oracles::schema_error(design_schema, to_json(design));
  CHECK_MESSAGE(!err, err.value_or(""));

  RiskEstimate se = ge_se_linear(cfg.problem, design.a_star, 2, 5000, 1);
  RiskEstimate orr = ge_or_linear(cfg.problem, design.a_star, 1, 5000, 1);
  json risk_schema = load_schema("risk_estimate.json");
  err = oracles::schema_error(risk_schema, to_json(se));
  CHECK_MESSAGE(!err, err.value_or(""));
  err = oracles::schema_error(risk_schema, to_json(orr));
  CHECK_MESSAGE(!err, err.value_or(""));

  BatteryConfig battery = default_battery();
  battery.items.erase(battery.items.begin() + 2, battery.items.end());
  battery.samples = 3000;
  json verify_schema = load_schema("verify_report.json");
  err = oracles::schema_error(verify_schema, to_json(run_battery(battery)));
  CHECK_MESSAGE(!err, err.value_or(""));

  json borell_row = to_json(borell_ratio_check(NoiseModel::laplace(1.0, 1),
                                               Eigen::VectorXd::Ones(1), 1, 2, 1000, 0));
  borell_row["p"] = 1.0;
  borell_row["q"] = 2.0;
  json diag_doc = {{"family", "laplace"},
                   {"sigma", 1.0},
                   {"density", to_json(density_floor_check(NoiseModel::laplace(1.0, 1)))},
                   {"borell", json::array({borell_row})},
                   {"pass", true}};
  json diag_schema = load_schema("noise_diagnostics.json");
  err = oracles::schema_error(diag_schema, diag_doc);
  CHECK_MESSAGE(!err, err.value_or(""));

  // Schema violations are caught: drop a required key, break an enum.
  json broken = to_json(se);
  broken.erase("value");
  CHECK(oracles::schema_error(risk_schema, broken).has_value());
  broken = to_json(se);
  broken["kind"] = "other";
  CHECK(oracles::schema_error(risk_schema, broken).has_value());
  broken = to_json(se);
  broken["extra"] = 1;
  CHECK(oracles::schema_error(risk_schema, broken).has_value());
}
