#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace recovery {

enum class NoiseKind { kGaussian, kLaplace, kUniform, kRademacher, kCorrelated };

std::string noise_kind_name(NoiseKind kind);

// Mean-zero noise in R^m. Every family is normalized so that each coordinate
// has variance sigma^2: Laplace uses scale sigma/sqrt(2), the uniform cube has
// half-width sqrt(3) sigma. Correlated noise is M e with e drawn from an
// isotropic base model.
//
// Sampling is counter based: draw (i, j) is a pure function of
// (seed, sample index i, coordinate j), so any partition of the index space
// reproduces the serial stream.
class NoiseModel {
 public:
  static NoiseModel gaussian(double sigma, Eigen::Index m);
  static NoiseModel laplace(double sigma, Eigen::Index m);
  static NoiseModel uniform(double sigma, Eigen::Index m);
  static NoiseModel rademacher(double sigma);
  static NoiseModel correlated(const NoiseModel& base, Eigen::MatrixXd mixing);

  NoiseKind kind() const { return kind_; }
  NoiseKind base_kind() const { return base_kind_; }
  Eigen::Index dim() const { return m_; }
  double sigma() const { return sigma_; }
  bool is_log_concave() const { return base_kind_ != NoiseKind::kRademacher; }

  // True when <a, e> is exactly Gaussian for every a.
  bool scalar_gaussian() const { return base_kind_ == NoiseKind::kGaussian; }

  Eigen::MatrixXd covariance() const;

  // Mixing matrix of correlated noise; identity otherwise.
  Eigen::MatrixXd mixing() const;
  bool has_mixing() const { return kind_ == NoiseKind::kCorrelated; }

  // sqrt(a' Cov a) = sigma |M' a|: the exact standard deviation of <a, e>,
  // and the calibrated deterministic-noise term of the design objective.
  double linear_scale(const Eigen::VectorXd& a) const;

  // M' a; equals a for isotropic models. The whitened counterpart of <a, .>.
  Eigen::VectorXd mixed_functional(const Eigen::VectorXd& a) const;

  Eigen::MatrixXd sample(Eigen::Index count, std::uint64_t seed) const;
  void sample_row(std::uint64_t seed, std::int64_t index, Eigen::Ref<Eigen::VectorXd> out) const;

 private:
  NoiseModel(NoiseKind kind, double sigma, Eigen::Index m);

  NoiseKind kind_;
  NoiseKind base_kind_;
  double sigma_;
  Eigen::Index m_;
  Eigen::MatrixXd mixing_;  // empty unless correlated
};

struct BorellCheck {
  double ratio = 0;       // (E|<u,e>|^q)^(1/q) / (E|<u,e>|^p)^(1/p), estimated
  double std_error = 0;   // delta-method standard error of the ratio
  double bound = 0;       // C q / p with C = e
  bool within_bound = false;   // ratio <= bound + 3 std_error
  bool lemma_applicable = true;  // false when the noise is not log-concave
};

BorellCheck borell_ratio_check(const NoiseModel& model, const Eigen::VectorXd& u, double p,
                               double q, std::int64_t count, std::uint64_t seed);

struct DensityDiagnostics {
  double pi0 = 0;          // density at the origin
  double min_density = 0;  // minimum over the central window grid
  bool floor_ok = false;   // min density >= kDelta / sigma on |x| <= kGamma sigma
  bool hensley_ok = false;  // 1/(2 sqrt(3) e sigma) <= pi0 <= 3/sigma
};

// Exact-density diagnostics for the one-dimensional continuous families,
// evaluated on a 1001-point grid over [-kGamma sigma, kGamma sigma].
DensityDiagnostics density_floor_check(const NoiseModel& model);

}  // namespace recovery
