#pragma once

#include <Eigen/Dense>

#include "recovery/model_set.hpp"
#include "recovery/noise.hpp"

namespace recovery {

// Estimate Q(f) = <q, f> from y = lambda f + e, f constrained to the model set.
struct Problem {
  Eigen::MatrixXd lambda;  // m x n
  Eigen::VectorXd q;       // n
  ModelSet set;
  NoiseModel noise;

  Eigen::Index n() const { return lambda.cols(); }
  Eigen::Index m() const { return lambda.rows(); }
};

// Validates dimensions and the regularity condition
// (no h != 0 with |h|_K = 0 and lambda h = 0).
Problem make_problem(Eigen::MatrixXd lambda, Eigen::VectorXd q, ModelSet set, NoiseModel noise);

// Rewrites y = lambda f + M e_base as M^{-1} y = (M^{-1} lambda) f + e_base.
// Requires correlated noise with a well-conditioned mixing matrix. Risks are
// preserved under the map pairing a <-> M' a.
Problem whiten(const Problem& problem);

}  // namespace recovery
