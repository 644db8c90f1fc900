#include "recovery/design.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace recovery {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Evaluation machinery for J(a) = support(q - lambda' a) + sigma |M' a| with
// cached factorizations. Approximability sets restrict a to the affine
// subspace (lambda V)' a = V' q on which the support value is finite; the
// support term is computed from the projected residual there, which agrees
// with the strict support value on the subspace and stays finite under
// floating-point drift.
class Det1Machine {
 public:
  explicit Det1Machine(const Problem& problem) : prob_(problem) {
    sigma_ = prob_.noise.sigma();
    has_mix_ = prob_.noise.has_mixing();
    if (has_mix_) mix_ = prob_.noise.mixing();
    if (const auto* app = std::get_if<Approximability>(&prob_.set)) {
      constrained_ = true;
      basis_ = app->basis();
      eps_ = app->eps();
      bmat_ = prob_.lambda * basis_;
      target_ = basis_.transpose() * prob_.q;
      gram_.compute(bmat_.transpose() * bmat_);
      if (gram_.info() != Eigen::Success) {
        throw std::domain_error("design_linear: functional is not recoverable on the free subspace");
      }
    }
  }

  const Problem& problem() const { return prob_; }
  bool constrained() const { return constrained_; }

  Eigen::VectorXd project(const Eigen::VectorXd& a) const {
    if (!constrained_) return a;
    return a - bmat_ * gram_.solve(bmat_.transpose() * a - target_);
  }

  Eigen::VectorXd feasible_init() const {
    Eigen::VectorXd a = project(Eigen::VectorXd::Zero(prob_.m()));
    if (constrained_) {
      const double residual = (bmat_.transpose() * a - target_).norm();
      if (residual > 1e-8 * (1.0 + target_.norm())) {
        throw std::domain_error("design_linear: functional is not recoverable (no finite objective)");
      }
    }
    return a;
  }

  double value(const Eigen::VectorXd& a, Eigen::VectorXd* grad) const {
    Eigen::VectorXd c = prob_.q - prob_.lambda.transpose() * a;
    double support = 0;
    Eigen::VectorXd maximizer;
    if (constrained_) {
      Eigen::VectorXd r = c - basis_ * (basis_.transpose() * c);
      const double rn = r.norm();
      support = eps_ * rn;
      if (grad) maximizer = rn > 0 ? Eigen::VectorXd(eps_ * r / rn) : Eigen::VectorXd::Zero(c.size());
    } else {
      XReal s = support_value(prob_.set, c);
      support = s.value();
      if (grad) maximizer = support_maximizer(prob_.set, c);
    }
    const double w = prob_.noise.linear_scale(a);
    if (grad) {
      *grad = -prob_.lambda * maximizer;
      if (w > 0) {
        if (has_mix_) {
          grad->noalias() += (sigma_ * sigma_ / w) * (mix_ * (mix_.transpose() * a));
        } else {
          *grad += (sigma_ * sigma_ / w) * a;
        }
      }
      if (constrained_) *grad -= bmat_ * gram_.solve(bmat_.transpose() * *grad);
    }
    return support + w;
  }

 private:
  const Problem& prob_;
  double sigma_ = 0;
  bool has_mix_ = false;
  Eigen::MatrixXd mix_;
  bool constrained_ = false;
  Eigen::MatrixXd basis_;
  double eps_ = 0;
  Eigen::MatrixXd bmat_;
  Eigen::VectorXd target_;
  Eigen::LLT<Eigen::MatrixXd> gram_;
};

struct SubgradientOutcome {
  Eigen::VectorXd a;
  double objective = 0;
  int iterations = 0;
};

// Projected subgradient descent with Polyak steps. With a known optimum the
// step is (J - J*)/|g|^2; otherwise the target tracks best - delta with delta
// halved after stretches without progress. Iterates are averaged over
// geometrically restarted windows (covering roughly the final half) and the
// better of the best iterate and the window average is returned.
SubgradientOutcome minimize_det1(const Det1Machine& machine, const SolverOptions& options,
                                 std::optional<double> target) {
  if (options.max_iter < 1) throw std::invalid_argument("design_linear: max_iter must be positive");
  if (!(options.tol > 0)) throw std::invalid_argument("design_linear: tol must be positive");

  Eigen::VectorXd a = machine.feasible_init();
  Eigen::VectorXd grad(a.size());
  double value = machine.value(a, &grad);

  Eigen::VectorXd best_a = a;
  double best = value;

  double delta = 0.25 * (1.0 + value);
  double mark = best;
  int stalled = 0;

  Eigen::VectorXd window_sum = a;
  std::int64_t window_len = 1;
  int next_restart = 2;

  int k = 0;
  for (; k < options.max_iter; ++k) {
    double level;
    if (target) {
      level = *target;
      if (best - level <= options.tol * (1.0 + std::abs(level))) break;
    } else {
      if (delta <= options.tol * (1.0 + best)) break;
      level = best - delta;
    }

    const double gg = grad.squaredNorm();
    if (!(gg > 1e-300)) break;
    const double step = std::max(value - level, 0.0) / gg;
    a -= step * grad;
    if (machine.constrained()) a = machine.project(a);

    value = machine.value(a, &grad);
    if (value < best) {
      best = value;
      best_a = a;
    }

    if (!target) {
      if (best <= mark - 0.25 * delta) {
        mark = best;
        stalled = 0;
      } else if (++stalled >= 100) {
        delta *= 0.5;
        mark = best;
        stalled = 0;
      }
    }

    if (k + 2 == next_restart) {
      window_sum = a;
      window_len = 1;
      next_restart *= 2;
    } else {
      window_sum += a;
      ++window_len;
    }
  }

  SubgradientOutcome out;
  Eigen::VectorXd averaged = window_sum / static_cast<double>(window_len);
  if (machine.constrained()) averaged = machine.project(averaged);
  const double avg_value = machine.value(averaged, nullptr);
  if (avg_value < best) {
    out.a = averaged;
    out.objective = avg_value;
  } else {
    out.a = best_a;
    out.objective = best;
  }
  out.iterations = k;
  return out;
}

Eigen::MatrixXd gauge_gram(const Problem& problem) {
  if (const auto* ell = std::get_if<Ellipsoid>(&problem.set)) {
    return ell->shape().transpose() * ell->shape();
  }
  const auto& app = std::get<Approximability>(problem.set);
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(problem.n(), problem.n()) -
                      app.basis() * app.basis().transpose();
  return p / (app.eps() * app.eps());
}

Eigen::MatrixXd noise_gram(const Problem& problem) {
  const double sigma = problem.noise.sigma();
  Eigen::MatrixXd lw = problem.lambda;
  if (problem.noise.has_mixing()) {
    lw = problem.noise.mixing().partialPivLu().solve(lw);
  }
  Eigen::MatrixXd g = lw.transpose() * lw / (sigma * sigma);
  return 0.5 * (g + g.transpose());
}

// q' B(t)^{-1} q through the eigendecomposition, +inf when q leaves the range.
double inverse_quadratic(const Eigen::MatrixXd& bt, const Eigen::VectorXd& q) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(bt);
  const Eigen::VectorXd& lam = es.eigenvalues();
  const double lmax = lam[lam.size() - 1];
  const double qn = q.norm();
  if (!(lmax > 0)) return qn > 0 ? kInf : 0.0;
  const Eigen::VectorXd uq = es.eigenvectors().transpose() * q;
  const double thresh = 1e-14 * lmax;
  double total = 0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam[i] > thresh) {
      total += uq[i] * uq[i] / lam[i];
    } else if (std::abs(uq[i]) > 1e-9 * qn) {
      return kInf;
    }
  }
  return total;
}

// min over t in [0,1] of q' (t G1 + (1-t) G2)^{-1} q by golden section
// (convex in t); endpoints are pseudo-inverse limits.
double golden_min(const Eigen::MatrixXd& g1, const Eigen::MatrixXd& g2,
                  const Eigen::VectorXd& q) {
  const auto phi = [&](double t) {
    return inverse_quadratic(t * g1 + (1.0 - t) * g2, q);
  };
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = 1.0;
  double best = std::min(phi(0.0), phi(1.0));
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = phi(x1);
  double f2 = phi(x2);
  best = std::min({best, f1, f2});
  for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = phi(x1);
      best = std::min(best, f1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = phi(x2);
      best = std::min(best, f2);
    }
  }
  return best;
}

// sigma = 0: sup of <q, h> over the gauge ball restricted to ker(lambda).
double kernel_null_error(const Problem& problem) {
  Eigen::MatrixXd lw = problem.lambda;
  if (problem.noise.has_mixing()) {
    lw = problem.noise.mixing().partialPivLu().solve(lw);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(lw, Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double smax = s.size() > 0 ? s[0] : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > 1e-12 * std::max(smax, 1.0)) ++rank;
  }
  const Eigen::Index dim = problem.n() - rank;
  if (dim == 0) return 0.0;
  Eigen::MatrixXd kernel = svd.matrixV().rightCols(dim);
  Eigen::MatrixXd restricted = kernel.transpose() * gauge_gram(problem) * kernel;
  Eigen::VectorXd qz = kernel.transpose() * problem.q;
  Eigen::LLT<Eigen::MatrixXd> llt(restricted);
  if (llt.info() != Eigen::Success) {
    throw std::domain_error("null_error: gauge degenerate on ker(lambda)");
  }
  const double v = qz.dot(llt.solve(qz));
  return v > 0 ? std::sqrt(v) : 0.0;
}

double null_error_quadratic(const Problem& problem) {
  if (problem.noise.sigma() == 0) return kernel_null_error(problem);
  const double v = golden_min(gauge_gram(problem), noise_gram(problem), problem.q);
  if (v == kInf) {
    throw std::domain_error("null_error: feasible set is unbounded in the functional direction");
  }
  return v > 0 ? std::sqrt(v) : 0.0;
}

}  // namespace

XReal det1_objective(const Problem& problem, const Eigen::VectorXd& a) {
  if (a.size() != problem.m()) {
    throw std::invalid_argument("det1_objective: a must have one entry per measurement");
  }
  const Eigen::VectorXd c = problem.q - problem.lambda.transpose() * a;
  XReal support = support_value(problem.set, c);
  if (support.is_infinite()) return XReal::infinity();
  return XReal(support.value() + problem.noise.linear_scale(a));
}

double null_error(const Problem& problem, double tol) {
  if (!(tol > 0)) throw std::invalid_argument("null_error: tol must be positive");
  if (std::holds_alternative<Box>(problem.set)) {
    Det1Machine machine(problem);
    SolverOptions options{tol, 200000};
    return minimize_det1(machine, options, std::nullopt).objective;
  }
  return null_error_quadratic(problem);
}

DesignReport design_linear(const Problem& problem, const SolverOptions& options) {
  Det1Machine machine(problem);
  DesignReport report;
  if (std::holds_alternative<Box>(problem.set)) {
    auto out = minimize_det1(machine, options, std::nullopt);
    report.a_star = out.a;
    report.objective = out.objective;
    report.null_error = out.objective;
    report.duality_gap = 0;
    report.iterations = out.iterations;
    return report;
  }
  const double n0 = null_error_quadratic(problem);
  auto out = minimize_det1(machine, options,
                           options.use_null_target ? std::optional<double>(n0) : std::nullopt);
  report.a_star = out.a;
  report.objective = out.objective;
  report.null_error = n0;
  report.duality_gap = out.objective - n0;
  report.iterations = out.iterations;
  return report;
}

OneDLinearDesign oned_optimal_linear(double b, double c, double tau, double sigma) {
  if (!std::isfinite(b) || !std::isfinite(c) || !std::isfinite(tau) || !std::isfinite(sigma)) {
    throw std::invalid_argument("oned_optimal_linear: arguments must be finite");
  }
  if (c == 0) throw std::invalid_argument("oned_optimal_linear: c must be nonzero");
  if (!(tau > 0)) throw std::invalid_argument("oned_optimal_linear: tau must be positive");
  if (sigma < 0) throw std::invalid_argument("oned_optimal_linear: sigma must be nonnegative");
  const double denom = sigma * sigma + c * c * tau * tau;
  OneDLinearDesign design;
  design.a_star = b * c * tau * tau / denom;
  design.value = std::abs(b) * tau * sigma / std::sqrt(denom);
  return design;
}

}  // namespace recovery
