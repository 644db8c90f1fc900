#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

namespace recovery {

// Worker count from RECOVERY_THREADS (default 1, clamped to [1, 256]).
int worker_count();

// Pairwise summation via the binary-counter trick: add() reproduces the
// left-to-right pairwise reduction tree regardless of how calls are batched.
class PairwiseSum {
 public:
  void add(double x) {
    int level = 0;
    for (std::uint64_t mask = count_; mask & 1ull; mask >>= 1, ++level) {
      x += partial_[level];
    }
    partial_[level] = x;
    ++count_;
  }

  double total() const {
    double s = 0;
    int level = 0;
    for (std::uint64_t mask = count_; mask != 0; mask >>= 1, ++level) {
      if (mask & 1ull) s += partial_[level];
    }
    return s;
  }

 private:
  double partial_[64] = {};
  std::uint64_t count_ = 0;
};

struct BlockedMoments {
  Eigen::VectorXd sum;    // per statistic
  Eigen::VectorXd sumsq;  // per statistic
  std::int64_t count = 0;

  double mean(int g = 0) const { return sum[g] / static_cast<double>(count); }
  double variance(int g = 0) const {
    double m = mean(g);
    double v = sumsq[g] / static_cast<double>(count) - m * m;
    return v > 0 ? v : 0;
  }
  // Standard error of the sample mean.
  double mean_std_error(int g = 0) const {
    return count > 1 ? std::sqrt(variance(g) / static_cast<double>(count - 1)) : 0.0;
  }
};

// Evaluates nstats statistics for each index in [0, count) and accumulates
// sums and sums of squares. The index space is cut into fixed 4096-wide
// blocks summed pairwise; block totals are combined pairwise in index order.
// The plan never depends on the worker count, so results are bit-identical
// for every RECOVERY_THREADS setting.
BlockedMoments blocked_moments(std::int64_t count, int nstats,
                               const std::function<void(std::int64_t, double*)>& eval);

}  // namespace recovery
