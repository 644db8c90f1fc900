#include "recovery/config.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>
#include <vector>

namespace recovery {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError("config error at \"" + path + "\": " + message);
}

void check_keys(const json& node, const std::string& path, std::set<std::string> allowed) {
  for (const auto& item : node.items()) {
    if (!allowed.count(item.key())) fail(path, "unknown key \"" + item.key() + "\"");
  }
}

const json& require(const json& node, const std::string& path, const std::string& key) {
  const auto it = node.find(key);
  if (it == node.end()) fail(path, "missing required key \"" + key + "\"");
  return *it;
}

const json& require_object(const json& node, const std::string& path) {
  if (!node.is_object()) fail(path, "expected an object");
  return node;
}

double as_number(const json& node, const std::string& path) {
  if (!node.is_number()) fail(path, "expected a number");
  return node.get<double>();
}

std::int64_t as_positive_int(const json& node, const std::string& path) {
  if (!node.is_number_integer()) fail(path, "expected an integer");
  const std::int64_t v = node.get<std::int64_t>();
  if (v <= 0) fail(path, "expected a positive integer");
  return v;
}

std::uint64_t as_seed(const json& node, const std::string& path) {
  if (node.is_number_unsigned()) return node.get<std::uint64_t>();
  if (node.is_number_integer() && node.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(node.get<std::int64_t>());
  }
  fail(path, "expected a nonnegative integer");
}

std::string as_string(const json& node, const std::string& path) {
  if (!node.is_string()) fail(path, "expected a string");
  return node.get<std::string>();
}

Eigen::VectorXd parse_vector(const json& node, const std::string& path) {
  if (!node.is_array() || node.empty()) fail(path, "expected a non-empty array of numbers");
  Eigen::VectorXd v(node.size());
  for (std::size_t i = 0; i < node.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = as_number(node[i], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

Eigen::MatrixXd parse_matrix(const json& node, const std::string& path) {
  if (!node.is_array() || node.empty()) fail(path, "expected a non-empty array of rows");
  const std::size_t rows = node.size();
  std::size_t cols = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    const std::string row_path = path + "[" + std::to_string(i) + "]";
    if (!node[i].is_array() || node[i].empty()) fail(row_path, "expected a non-empty row");
    if (i == 0) {
      cols = node[i].size();
    } else if (node[i].size() != cols) {
      fail(row_path, "rows must all have length " + std::to_string(cols));
    }
  }
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          as_number(node[i][j], path + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
    }
  }
  return m;
}

ModelSet parse_set(const json& node, Eigen::Index n) {
  require_object(node, "set");
  const std::string type = as_string(require(node, "set", "type"), "set.type");
  if (type == "ellipsoid") {
    check_keys(node, "set", {"type", "shape"});
    Eigen::MatrixXd shape = parse_matrix(require(node, "set", "shape"), "set.shape");
    if (shape.rows() != n || shape.cols() != n) {
      fail("set.shape", "expected a " + std::to_string(n) + "x" + std::to_string(n) +
                            " matrix to match lambda's columns");
    }
    return Ellipsoid(shape);
  }
  if (type == "box") {
    check_keys(node, "set", {"type", "tau"});
    const double tau = as_number(require(node, "set", "tau"), "set.tau");
    if (!(tau > 0)) fail("set.tau", "expected a positive number");
    return Box(n, tau);
  }
  if (type == "approximability") {
    check_keys(node, "set", {"type", "basis", "eps"});
    Eigen::MatrixXd basis = parse_matrix(require(node, "set", "basis"), "set.basis");
    if (basis.rows() != n) {
      fail("set.basis", "expected " + std::to_string(n) + " rows to match lambda's columns");
    }
    const double eps = as_number(require(node, "set", "eps"), "set.eps");
    if (!(eps > 0)) fail("set.eps", "expected a positive number");
    return Approximability(basis, eps);
  }
  fail("set.type", "expected \"ellipsoid\", \"box\" or \"approximability\"");
}

NoiseModel parse_noise(const json& node, Eigen::Index m) {
  require_object(node, "noise");
  const std::string family = as_string(require(node, "noise", "family"), "noise.family");
  const auto sigma_of = [&]() {
    const double sigma = as_number(require(node, "noise", "sigma"), "noise.sigma");
    if (sigma < 0) fail("noise.sigma", "expected a nonnegative number");
    return sigma;
  };
  if (family == "gaussian" || family == "laplace" || family == "uniform") {
    check_keys(node, "noise", {"family", "sigma"});
    const double sigma = sigma_of();
    if (family == "gaussian") return NoiseModel::gaussian(sigma, m);
    if (family == "laplace") return NoiseModel::laplace(sigma, m);
    return NoiseModel::uniform(sigma, m);
  }
  if (family == "rademacher") {
    check_keys(node, "noise", {"family", "sigma"});
    if (m != 1) fail("noise.family", "rademacher noise needs a single measurement row");
    return NoiseModel::rademacher(sigma_of());
  }
  if (family == "correlated") {
    check_keys(node, "noise", {"family", "base", "sigma", "mixing"});
    const std::string base = as_string(require(node, "noise", "base"), "noise.base");
    const double sigma = sigma_of();
    Eigen::MatrixXd mixing = parse_matrix(require(node, "noise", "mixing"), "noise.mixing");
    if (mixing.rows() != m || mixing.cols() != m) {
      fail("noise.mixing", "expected a " + std::to_string(m) + "x" + std::to_string(m) +
                               " matrix to match lambda's rows");
    }
    NoiseModel iso = NoiseModel::gaussian(sigma, m);
    if (base == "laplace") {
      iso = NoiseModel::laplace(sigma, m);
    } else if (base == "uniform") {
      iso = NoiseModel::uniform(sigma, m);
    } else if (base != "gaussian") {
      fail("noise.base", "expected \"gaussian\", \"laplace\" or \"uniform\"");
    }
    return NoiseModel::correlated(iso, mixing);
  }
  fail("noise.family",
       "expected \"gaussian\", \"laplace\", \"uniform\", \"rademacher\" or \"correlated\"");
}

json set_to_json(const ModelSet& set) {
  if (const auto* ell = std::get_if<Ellipsoid>(&set)) {
    return {{"type", "ellipsoid"}, {"shape", to_json(ell->shape())}};
  }
  if (const auto* box = std::get_if<Box>(&set)) {
    return {{"type", "box"}, {"tau", box->tau()}};
  }
  const auto& app = std::get<Approximability>(set);
  return {{"type", "approximability"}, {"basis", to_json(app.basis())}, {"eps", app.eps()}};
}

json noise_to_json(const NoiseModel& noise) {
  if (noise.has_mixing()) {
    return {{"family", "correlated"},
            {"base", noise_kind_name(noise.base_kind())},
            {"sigma", noise.sigma()},
            {"mixing", to_json(noise.mixing())}};
  }
  return {{"family", noise_kind_name(noise.kind())}, {"sigma", noise.sigma()}};
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

}  // namespace

RunConfig parse_run_config(const json& root) {
  require_object(root, "(root)");
  check_keys(root, "(root)", {"lambda", "q", "set", "noise", "solver", "mc"});

  Eigen::MatrixXd lambda = parse_matrix(require(root, "(root)", "lambda"), "lambda");
  Eigen::VectorXd q = parse_vector(require(root, "(root)", "q"), "q");
  if (q.size() != lambda.cols()) {
    fail("q", "expected length " + std::to_string(lambda.cols()) + " to match lambda's columns");
  }
  ModelSet set = parse_set(require(root, "(root)", "set"), lambda.cols());
  NoiseModel noise = parse_noise(require(root, "(root)", "noise"), lambda.rows());

  SolverOptions solver;
  if (root.contains("solver")) {
    const json& node = require_object(root["solver"], "solver");
    check_keys(node, "solver", {"tol", "max_iter"});
    if (node.contains("tol")) {
      solver.tol = as_number(node["tol"], "solver.tol");
      if (!(solver.tol > 0)) fail("solver.tol", "expected a positive number");
    }
    if (node.contains("max_iter")) {
      const std::int64_t iters = as_positive_int(node["max_iter"], "solver.max_iter");
      if (iters > 100000000) fail("solver.max_iter", "expected at most 1e8");
      solver.max_iter = static_cast<int>(iters);
    }
  }

  std::int64_t samples = 100000;
  std::uint64_t seed = 0;
  if (root.contains("mc")) {
    const json& node = require_object(root["mc"], "mc");
    check_keys(node, "mc", {"samples", "seed"});
    if (node.contains("samples")) samples = as_positive_int(node["samples"], "mc.samples");
    if (node.contains("seed")) seed = as_seed(node["seed"], "mc.seed");
  }

  Problem problem = [&] {
    try {
      return make_problem(lambda, q, set, noise);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config error: ") + e.what());
    }
  }();

  json resolved = {{"lambda", to_json(lambda)},
                   {"q", to_json(q)},
                   {"set", set_to_json(set)},
                   {"noise", noise_to_json(noise)},
                   {"solver", {{"tol", solver.tol}, {"max_iter", solver.max_iter}}},
                   {"mc", {{"samples", samples}, {"seed", seed}}}};
  return RunConfig{std::move(problem), solver, samples, seed, std::move(resolved)};
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json parsed;
  try {
    parsed = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  return parse_run_config(parsed);
}

json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

json to_json(const RiskEstimate& est) {
  return {{"kind", est.kind == RiskKind::kSe ? "se" : "or"},
          {"p", est.p},
          {"value", est.value},
          {"std_error", est.std_error},
          {"method", est.method == RiskMethod::kExact ? "exact" : "monte_carlo"},
          {"samples", est.samples}};
}

json to_json(const DesignReport& report) {
  return {{"a_star", to_json(report.a_star)},
          {"objective", report.objective},
          {"null_error", report.null_error},
          {"duality_gap", report.duality_gap},
          {"iterations", report.iterations}};
}

json to_json(const SandwichReport& report) {
  return {{"problem_id", report.problem_id},
          {"design", to_json(report.design)},
          {"null_error", report.null_error},
          {"ge_or_1", to_json(report.ge_or_1)},
          {"lower", report.lower},
          {"upper", report.upper},
          {"slack_lower", report.slack_lower},
          {"slack_upper", report.slack_upper},
          {"applicable", report.applicable},
          {"reason", report.reason},
          {"pass", report.pass}};
}

json to_json(const ComparisonCheck& check) {
  return {{"name", check.name},
          {"p", check.p},
          {"q", check.q},
          {"lhs", check.lhs},
          {"rhs", check.rhs},
          {"slack", check.slack},
          {"std_error", check.std_error},
          {"applicable", check.applicable},
          {"reason", check.reason},
          {"pass", check.pass}};
}

json to_json(const ComparisonReport& report) {
  json checks = json::array();
  for (const auto& check : report.checks) checks.push_back(to_json(check));
  return {{"problem_id", report.problem_id}, {"checks", std::move(checks)},
          {"all_pass", report.all_pass}};
}

json to_json(const BatteryResult& result) {
  json items = json::array();
  for (const auto& item : result.items) {
    json row = {{"id", item.id}, {"pass", item.pass}};
    if (item.sandwich) row["sandwich"] = to_json(*item.sandwich);
    if (item.comparisons) row["comparisons"] = to_json(*item.comparisons);
    items.push_back(std::move(row));
  }
  return {{"items", std::move(items)},
          {"checks_total", result.checks_total},
          {"checks_failed", result.checks_failed},
          {"not_applicable", result.not_applicable},
          {"pass", result.pass}};
}

json to_json(const BorellCheck& check) {
  return {{"ratio", check.ratio},
          {"std_error", check.std_error},
          {"bound", check.bound},
          {"within_bound", check.within_bound},
          {"lemma_applicable", check.lemma_applicable}};
}

json to_json(const DensityDiagnostics& diag) {
  return {{"pi0", diag.pi0},
          {"min_density", diag.min_density},
          {"floor_ok", diag.floor_ok},
          {"hensley_ok", diag.hensley_ok}};
}

std::string battery_csv(const BatteryResult& result) {
  std::string out = "problem_id,check,value,bound,slack,pass\n";
  const auto pass_str = [](bool applicable, bool pass) {
    return applicable ? (pass ? "true" : "false") : "na";
  };
  for (const auto& item : result.items) {
    if (item.sandwich) {
      const auto& s = *item.sandwich;
      const double spread = kSigmaSlack * s.ge_or_1.std_error;
      out += item.id + ",sandwich_lower," + fmt(s.ge_or_1.value) + "," +
             fmt(s.lower - spread) + "," + fmt(s.slack_lower) + "," +
             pass_str(s.applicable, s.pass) + "\n";
      out += item.id + ",sandwich_upper," + fmt(s.ge_or_1.value) + "," +
             fmt(s.upper + spread) + "," + fmt(s.slack_upper) + "," +
             pass_str(s.applicable, s.pass) + "\n";
    }
    if (item.comparisons) {
      for (const auto& check : item.comparisons->checks) {
        char name[64];
        std::snprintf(name, sizeof(name), "%s:p%g:q%g", check.name.c_str(), check.p, check.q);
        out += item.id + "," + name + "," + fmt(check.lhs) + "," + fmt(check.rhs) + "," +
               fmt(check.slack) + "," + pass_str(check.applicable, check.pass) + "\n";
      }
    }
  }
  return out;
}

}  // namespace recovery
