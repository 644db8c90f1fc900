#include "recovery/problem.hpp"

#include <sstream>
#include <stdexcept>

namespace recovery {

Problem make_problem(Eigen::MatrixXd lambda, Eigen::VectorXd q, ModelSet set, NoiseModel noise) {
  if (lambda.rows() < 1 || lambda.cols() < 1) {
    throw std::invalid_argument("make_problem: lambda must be nonempty");
  }
  if (q.size() != lambda.cols()) {
    throw std::invalid_argument("make_problem: q length must match lambda columns");
  }
  if (ambient_dim(set) != lambda.cols()) {
    throw std::invalid_argument("make_problem: model set dimension must match lambda columns");
  }
  if (noise.dim() != lambda.rows()) {
    throw std::invalid_argument("make_problem: noise dimension must match lambda rows");
  }
  auto regularity = regularity_check(set, lambda);
  if (!regularity.regular) {
    std::ostringstream msg;
    msg << "make_problem: regularity fails; witness h with |h|_K = 0, lambda h = 0: [";
    for (Eigen::Index i = 0; i < regularity.witness.size(); ++i) {
      if (i) msg << ", ";
      msg << regularity.witness[i];
    }
    msg << "]";
    throw std::invalid_argument(msg.str());
  }
  return Problem{std::move(lambda), std::move(q), std::move(set), std::move(noise)};
}

Problem whiten(const Problem& problem) {
  if (problem.noise.kind() != NoiseKind::kCorrelated) {
    throw std::domain_error("whiten: noise is not correlated");
  }
  const Eigen::MatrixXd mixing = problem.noise.mixing();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(mixing);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (!(smin > 0) || !(smax / smin <= 1e12)) {
    throw std::domain_error("whiten: mixing matrix is singular or ill conditioned");
  }

  Eigen::MatrixXd white_lambda = mixing.partialPivLu().solve(problem.lambda);

  NoiseModel base = [&]() {
    switch (problem.noise.base_kind()) {
      case NoiseKind::kGaussian:
        return NoiseModel::gaussian(problem.noise.sigma(), problem.noise.dim());
      case NoiseKind::kLaplace:
        return NoiseModel::laplace(problem.noise.sigma(), problem.noise.dim());
      case NoiseKind::kUniform:
        return NoiseModel::uniform(problem.noise.sigma(), problem.noise.dim());
      case NoiseKind::kRademacher:
        return NoiseModel::rademacher(problem.noise.sigma());
      default:
        throw std::logic_error("whiten: unexpected base kind");
    }
  }();

  return make_problem(std::move(white_lambda), problem.q, problem.set, std::move(base));
}

}  // namespace recovery
