#pragma once

#include <Eigen/Dense>

#include "recovery/extended_real.hpp"
#include "recovery/problem.hpp"

namespace recovery {

struct SolverOptions {
  double tol = 1e-6;
  int max_iter = 5000;
  // When false, quadratic-gauge problems are solved with the adaptive target
  // level instead of the known null error; useful to keep the primal solve
  // independent of the dual value.
  bool use_null_target = true;
};

struct DesignReport {
  Eigen::VectorXd a_star;
  double objective = 0;    // worst-case bound sup_K <q - lambda' a, f> + sigma |M' a|
  double null_error = 0;   // matching lower bound
  double duality_gap = 0;  // objective - null_error
  int iterations = 0;
};

// Deterministic worst-case objective of the linear map <a, .>:
// support_value(K, q - lambda' a) + sigma |M' a|. Infinite when the residual
// functional is not bounded on K.
XReal det1_objective(const Problem& problem, const Eigen::VectorXd& a);

// sup { |<q, h>| : |h|_K <= 1, |M^{-1} lambda h|_2 <= sigma }.
// Quadratic-gauge sets use the parametric two-ellipsoid dual minimized by
// golden section; boxes take the dual route through the design objective,
// whose minimum equals the null error. sigma = 0 restricts to ker(lambda).
double null_error(const Problem& problem, double tol = 1e-9);

// Minimizes det1_objective by projected subgradient descent with Polyak
// steps (target = null error when available, adaptive level otherwise),
// deterministic zero initialization and tail-iterate averaging.
DesignReport design_linear(const Problem& problem, const SolverOptions& options = {});

struct OneDLinearDesign {
  double a_star = 0;
  double value = 0;  // minimax ge_se_2 risk of the optimal linear map
};

// Closed form for n = m = 1, K = [-tau, tau]: a* = b c tau^2 / (sigma^2 + c^2 tau^2),
// value |b| tau sigma / sqrt(sigma^2 + c^2 tau^2).
OneDLinearDesign oned_optimal_linear(double b, double c, double tau, double sigma);

}  // namespace recovery
