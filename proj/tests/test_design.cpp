#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <variant>

#include "oracles.hpp"
#include "recovery/design.hpp"
#include "recovery/problem.hpp"
#include "recovery/rng.hpp"

using namespace recovery;

namespace {

Eigen::VectorXd rand_vec(Eigen::Index n, std::uint64_t stream) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v[i] = 2.0 * uniform_open(51, stream, static_cast<std::uint64_t>(i)) - 1.0;
  }
  return v;
}

Eigen::MatrixXd rand_mat(Eigen::Index r, Eigen::Index c, std::uint64_t stream) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) {
      m(i, j) = 2.0 * uniform_open(52, stream, static_cast<std::uint64_t>(i * c + j)) - 1.0;
    }
  }
  return m;
}

Eigen::MatrixXd well_conditioned(Eigen::Index n, std::uint64_t stream) {
  Eigen::MatrixXd a = rand_mat(n, n, stream);
  a *= 0.3 / std::sqrt(static_cast<double>(n));
  a += Eigen::MatrixXd::Identity(n, n);
  return a;
}

Eigen::MatrixXd orthonormal_cols(Eigen::Index n, Eigen::Index k, std::uint64_t stream) {
  Eigen::MatrixXd g(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      g(i, j) = normal_quantile(uniform_open(53, stream, static_cast<std::uint64_t>(i * k + j)));
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
}

// Reference null error: sup <q, h> over the gauge ball intersected with
// {|lambda h| <= sigma}, by projected ascent (a certified lower bound).
double oracle_null_error(const Problem& problem) {
  const Eigen::Index n = problem.n();
  oracles::Projector project;
  std::function<double(const Eigen::VectorXd&)> gauge_fn;
  if (const auto* e = std::get_if<Ellipsoid>(&problem.set)) {
    Eigen::MatrixXd shape = e->shape();
    project = oracles::QuadBallProjector(shape, 1.0);
    gauge_fn = [shape](const Eigen::VectorXd& f) { return (shape * f).norm(); };
  } else if (const auto* b = std::get_if<Box>(&problem.set)) {
    const double tau = b->tau();
    project = [tau](const Eigen::VectorXd& x) {
      return x.cwiseMax(-tau).cwiseMin(tau).eval();
    };
    gauge_fn = [tau](const Eigen::VectorXd& f) {
      return f.size() ? f.cwiseAbs().maxCoeff() / tau : 0.0;
    };
  } else {
    const auto& a = std::get<Approximability>(problem.set);
    Eigen::MatrixXd p =
        (Eigen::MatrixXd::Identity(n, n) - a.basis() * a.basis().transpose()) / a.eps();
    project = oracles::QuadBallProjector(p, 1.0);
    gauge_fn = [p](const Eigen::VectorXd& f) { return (p * f).norm(); };
  }
  return oracles::constrained_support(problem.q, project, gauge_fn, problem.lambda,
                                      problem.noise.sigma());
}

}  // namespace

TEST_CASE("oned closed form matches a refining grid search") {
  // Exact quadratic risk of the linear map a: sqrt((b - a c)^2 tau^2 + a^2 sigma^2).
  for (std::uint64_t inst = 0; inst < 25; ++inst) {
    const double b = 2.0 * uniform_open(60, inst, 0) - 1.0;
    const double c = (uniform_open(60, inst, 1) < 0.5 ? -1 : 1) * (0.1 + uniform_open(60, inst, 2));
    const double tau = 0.1 + 2.0 * uniform_open(60, inst, 3);
    const double sigma = 0.1 + 2.0 * uniform_open(60, inst, 4);
    auto risk = [&](double a) {
      return std::sqrt(std::pow((b - a * c) * tau, 2) + a * a * sigma * sigma);
    };
    const double half = std::abs(b / c) + 1.0;
    double arg = 0;
    const double ref = oracles::refine_min(risk, -half, half, 4001, 4, &arg);
    auto design = oned_optimal_linear(b, c, tau, sigma);
    CHECK(design.value == doctest::Approx(ref).epsilon(1e-9));
    CHECK(design.a_star == doctest::Approx(arg).epsilon(1e-5));
    CHECK(risk(design.a_star) <= ref * (1 + 1e-12));
  }
}

TEST_CASE("oned special values") {
  auto unit = oned_optimal_linear(1, 1, 1, 1);
  CHECK(unit.a_star == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(unit.value == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));

  auto noiseless = oned_optimal_linear(2, -3, 0.7, 0);
  CHECK(noiseless.a_star == doctest::Approx(-2.0 / 3.0).epsilon(1e-15));
  CHECK(noiseless.value == 0.0);

  CHECK_THROWS_AS(oned_optimal_linear(1, 0, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(oned_optimal_linear(1, 1, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(oned_optimal_linear(1, 1, 1, -1), std::invalid_argument);
  CHECK_THROWS_AS(oned_optimal_linear(std::nan(""), 1, 1, 1), std::invalid_argument);
}

TEST_CASE("det1 objective evaluates the worst-case bound directly") {
  Eigen::MatrixXd lambda(2, 3);
  lambda << 1, 0, 1, 0, 1, -1;
  Eigen::VectorXd q(3);
  q << 1, 2, 0;
  Problem prob = make_problem(lambda, q, Box(3, 0.5), NoiseModel::gaussian(0.3, 2));
  Eigen::VectorXd a(2);
  a << 0.25, -0.5;
  Eigen::VectorXd resid = q - lambda.transpose() * a;
  const double expect = 0.5 * resid.lpNorm<1>() + 0.3 * a.norm();
  CHECK(det1_objective(prob, a).value() == doctest::Approx(expect).epsilon(1e-14));

  Eigen::VectorXd wrong(3);
  CHECK_THROWS_AS(det1_objective(prob, wrong), std::invalid_argument);
}

TEST_CASE("det1 objective is infinite off the recoverable manifold") {
  Eigen::MatrixXd v = orthonormal_cols(4, 2, 1);
  Eigen::MatrixXd lambda = rand_mat(3, 4, 2);
  Eigen::VectorXd q = rand_vec(4, 3);
  Problem prob = make_problem(lambda, q, Approximability(v, 0.5), NoiseModel::gaussian(1.0, 3));
  CHECK(det1_objective(prob, Eigen::VectorXd::Zero(3)).is_infinite());

  // On the manifold (lambda v)' a = v' q the residual is v-orthogonal.
  Eigen::MatrixXd bmat = lambda * v;
  Eigen::VectorXd a =
      bmat * (bmat.transpose() * bmat).ldlt().solve(v.transpose() * q);
  CHECK(det1_objective(prob, a).finite());
}

TEST_CASE("null error closed form: unit ellipsoid through the identity") {
  for (double sigma : {0.25, 1.0, 4.0}) {
    Eigen::VectorXd q = rand_vec(3, 70);
    Problem prob = make_problem(Eigen::MatrixXd::Identity(3, 3), q,
                                Ellipsoid(Eigen::MatrixXd::Identity(3, 3)),
                                NoiseModel::gaussian(sigma, 3));
    CHECK(null_error(prob) == doctest::Approx(q.norm() * std::min(1.0, sigma)).epsilon(1e-9));
  }
}

TEST_CASE("null error matches the feasible-ascent oracle") {
  SUBCASE("ellipsoid") {
    for (std::uint64_t inst = 0; inst < 4; ++inst) {
      const Eigen::Index n = 2 + static_cast<Eigen::Index>(inst);
      const Eigen::Index m = std::max<Eigen::Index>(2, n - 1);
      Problem prob = make_problem(rand_mat(m, n, 80 + inst), rand_vec(n, 90 + inst),
                                  Ellipsoid(well_conditioned(n, 85 + inst)),
                                  NoiseModel::gaussian(0.5 + 0.5 * inst, m));
      const double lib = null_error(prob);
      const double ref = oracle_null_error(prob);
      CHECK(ref <= lib * (1 + 1e-6) + 1e-9);  // oracle value is feasible
      CHECK(lib == doctest::Approx(ref).epsilon(2e-3));
    }
  }
  SUBCASE("box") {
    for (std::uint64_t inst = 0; inst < 3; ++inst) {
      const Eigen::Index n = 3;
      Problem prob = make_problem(rand_mat(2, n, 180 + inst), rand_vec(n, 190 + inst),
                                  Box(n, 0.4 + 0.3 * inst), NoiseModel::laplace(0.8, 2));
      const double lib = null_error(prob, 1e-8);
      const double ref = oracle_null_error(prob);
      CHECK(ref <= lib * (1 + 1e-4) + 1e-7);
      CHECK(lib == doctest::Approx(ref).epsilon(5e-3));
    }
  }
  SUBCASE("approximability") {
    for (std::uint64_t inst = 0; inst < 3; ++inst) {
      const Eigen::Index n = 4;
      Eigen::MatrixXd v = orthonormal_cols(n, 2, 280 + inst);
      Problem prob = make_problem(rand_mat(3, n, 281 + inst), rand_vec(n, 282 + inst),
                                  Approximability(v, 0.3 + 0.2 * inst),
                                  NoiseModel::uniform(1.0, 3));
      const double lib = null_error(prob);
      const double ref = oracle_null_error(prob);
      CHECK(ref <= lib * (1 + 1e-6) + 1e-9);
      CHECK(lib == doctest::Approx(ref).epsilon(2e-3));
    }
  }
}

TEST_CASE("null error with sigma = 0 restricts to the kernel") {
  const Eigen::Index n = 4;
  Eigen::MatrixXd lambda = rand_mat(2, n, 300);
  Eigen::VectorXd q = rand_vec(n, 301);
  Problem prob = make_problem(lambda, q, Ellipsoid(well_conditioned(n, 302)),
                              NoiseModel::gaussian(0.0, 2));
  const double lib = null_error(prob);
  const double ref = oracle_null_error(prob);
  CHECK(lib > 0);
  CHECK(lib == doctest::Approx(ref).epsilon(2e-3));

  // Full-rank square lambda leaves only h = 0.
  Problem pinned = make_problem(Eigen::MatrixXd::Identity(2, 2), rand_vec(2, 303),
                                Ellipsoid(Eigen::MatrixXd::Identity(2, 2)),
                                NoiseModel::gaussian(0.0, 2));
  CHECK(null_error(pinned) == doctest::Approx(0.0));
}

TEST_CASE("design achieves the null error on quadratic-gauge sets") {
  for (std::uint64_t inst = 0; inst < 4; ++inst) {
    const Eigen::Index n = 3 + static_cast<Eigen::Index>(inst % 2);
    Problem prob = make_problem(rand_mat(n, n, 400 + inst), rand_vec(n, 410 + inst),
                                Ellipsoid(well_conditioned(n, 420 + inst)),
                                NoiseModel::gaussian(0.7, n));
    SolverOptions opt;
    opt.tol = 1e-7;
    opt.max_iter = 60000;
    DesignReport report = design_linear(prob, opt);
    CHECK(report.duality_gap == doctest::Approx(report.objective - report.null_error));
    CHECK(report.duality_gap >= -1e-12);
    CHECK(report.duality_gap <= 1e-4 * (1 + report.null_error));
    // The reported map actually attains the reported objective.
    CHECK(det1_objective(prob, report.a_star).value() ==
          doctest::Approx(report.objective).epsilon(1e-12));
    CHECK(report.iterations > 0);

    // Independent of the dual target: the adaptive level reaches the same value.
    opt.use_null_target = false;
    DesignReport adaptive = design_linear(prob, opt);
    CHECK(adaptive.objective == doctest::Approx(report.objective).epsilon(1e-4));
  }
}

TEST_CASE("design on a box reports a zero gap by duality") {
  Problem prob = make_problem(rand_mat(2, 3, 500), rand_vec(3, 501), Box(3, 0.8),
                              NoiseModel::gaussian(0.6, 2));
  SolverOptions opt;
  opt.tol = 1e-7;
  opt.max_iter = 60000;
  DesignReport report = design_linear(prob, opt);
  CHECK(report.duality_gap == 0.0);
  CHECK(report.objective == report.null_error);
  CHECK(det1_objective(prob, report.a_star).value() ==
        doctest::Approx(report.objective).epsilon(1e-12));
  // Dual value is bracketed by the primal oracle.
  CHECK(oracle_null_error(prob) <= report.objective * (1 + 1e-4) + 1e-7);
}

TEST_CASE("design on the simplest setting recovers the scalar closed form") {
  // n = m = 1 box: objective tau |b - a c| + sigma |a| has minimum
  // min(tau |b|, sigma |b / c|), attained at a = 0 or a = b / c.
  Problem prob = make_problem(Eigen::MatrixXd::Constant(1, 1, 1.0),
                              Eigen::VectorXd::Constant(1, 1.0), Box(1, 1.0),
                              NoiseModel::gaussian(1.0, 1));
  DesignReport report = design_linear(prob);
  CHECK(report.objective == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(null_error(prob) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("design under the approximability constraint stays feasible") {
  const Eigen::Index n = 5;
  Eigen::MatrixXd v = orthonormal_cols(n, 2, 600);
  Eigen::MatrixXd lambda = rand_mat(3, n, 601);
  Eigen::VectorXd q = rand_vec(n, 602);
  Problem prob = make_problem(lambda, q, Approximability(v, 0.4), NoiseModel::gaussian(0.5, 3));
  SolverOptions opt;
  opt.tol = 1e-7;
  opt.max_iter = 60000;
  DesignReport report = design_linear(prob, opt);
  // Constraint (lambda v)' a = v' q holds, so the objective is finite.
  Eigen::VectorXd gap = (lambda * v).transpose() * report.a_star - v.transpose() * q;
  CHECK(gap.norm() <= 1e-8 * (1 + q.norm()));
  CHECK(det1_objective(prob, report.a_star).finite());
  CHECK(report.duality_gap <= 1e-4 * (1 + report.null_error));
}

TEST_CASE("whitening preserves the design problem under a <-> M'a") {
  const Eigen::Index n = 4, m = 3;
  Eigen::MatrixXd mix = well_conditioned(m, 700);
  Problem prob = make_problem(rand_mat(m, n, 701), rand_vec(n, 702),
                              Ellipsoid(well_conditioned(n, 703)),
                              NoiseModel::correlated(NoiseModel::gaussian(0.9, m), mix));
  Problem white = whiten(prob);
  CHECK_FALSE(white.noise.has_mixing());
  CHECK(white.noise.sigma() == prob.noise.sigma());

  Eigen::VectorXd a = rand_vec(m, 704);
  Eigen::VectorXd a_tilde = mix.transpose() * a;
  CHECK(det1_objective(prob, a).value() ==
        doctest::Approx(det1_objective(white, a_tilde).value()).epsilon(1e-10));
  CHECK(null_error(prob) == doctest::Approx(null_error(white)).epsilon(1e-8));

  CHECK_THROWS_AS(whiten(white), std::domain_error);
}

TEST_CASE("solver option validation") {
  Problem prob = make_problem(Eigen::MatrixXd::Identity(2, 2), rand_vec(2, 800),
                              Ellipsoid(Eigen::MatrixXd::Identity(2, 2)),
                              NoiseModel::gaussian(1.0, 2));
  SolverOptions bad;
  bad.max_iter = 0;
  CHECK_THROWS_AS(design_linear(prob, bad), std::invalid_argument);
  bad.max_iter = 100;
  bad.tol = 0;
  CHECK_THROWS_AS(design_linear(prob, bad), std::invalid_argument);
}

TEST_CASE("problem construction rejects inconsistent pieces") {
  Eigen::MatrixXd lambda(2, 3);
  lambda << 1, 0, 0, 0, 1, 0;
  Eigen::VectorXd q = rand_vec(3, 900);
  CHECK_THROWS_AS(make_problem(lambda, rand_vec(2, 901), Box(3, 1.0), NoiseModel::gaussian(1, 2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_problem(lambda, q, Box(2, 1.0), NoiseModel::gaussian(1, 2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_problem(lambda, q, Box(3, 1.0), NoiseModel::gaussian(1, 3)),
                  std::invalid_argument);

  // Irregular approximability model: unobserved free direction.
  Eigen::MatrixXd v(3, 1);
  v << 0, 0, 1;
  CHECK_THROWS_AS(make_problem(lambda, q, Approximability(v, 0.5), NoiseModel::gaussian(1, 2)),
                  std::invalid_argument);
}
