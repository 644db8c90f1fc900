#include "recovery/reduction.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <thread>
#include <vector>

namespace recovery {

namespace {

constexpr std::int64_t kBlock = 4096;

int read_worker_count() {
  const char* env = std::getenv("RECOVERY_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  long v = std::strtol(env, &end, 10);
  if (end == env || (end != nullptr && *end != '\0')) return 1;
  if (v < 1) return 1;
  if (v > 256) return 256;
  return static_cast<int>(v);
}

}  // namespace

int worker_count() {
  static const int count = read_worker_count();
  return count;
}

BlockedMoments blocked_moments(std::int64_t count, int nstats,
                               const std::function<void(std::int64_t, double*)>& eval) {
  if (count < 1) throw std::invalid_argument("blocked_moments: count must be positive");
  if (nstats < 1) throw std::invalid_argument("blocked_moments: nstats must be positive");

  const std::int64_t nblocks = (count + kBlock - 1) / kBlock;
  std::vector<Eigen::VectorXd> block_sum(nblocks);
  std::vector<Eigen::VectorXd> block_sumsq(nblocks);

  auto run_block = [&](std::int64_t blk) {
    const std::int64_t begin = blk * kBlock;
    const std::int64_t end = std::min(count, begin + kBlock);
    std::vector<PairwiseSum> sums(nstats);
    std::vector<PairwiseSum> squares(nstats);
    std::vector<double> buf(nstats);
    for (std::int64_t i = begin; i < end; ++i) {
      eval(i, buf.data());
      for (int g = 0; g < nstats; ++g) {
        sums[g].add(buf[g]);
        squares[g].add(buf[g] * buf[g]);
      }
    }
    Eigen::VectorXd s(nstats), ss(nstats);
    for (int g = 0; g < nstats; ++g) {
      s[g] = sums[g].total();
      ss[g] = squares[g].total();
    }
    block_sum[blk] = std::move(s);
    block_sumsq[blk] = std::move(ss);
  };

  const int workers = std::min<std::int64_t>(worker_count(), nblocks);
  if (workers <= 1) {
    for (std::int64_t blk = 0; blk < nblocks; ++blk) run_block(blk);
  } else {
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::int64_t blk = next.fetch_add(1); blk < nblocks; blk = next.fetch_add(1)) {
          run_block(blk);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  // Pairwise combination of block totals in index order.
  std::vector<Eigen::VectorXd>* level_sum = &block_sum;
  std::vector<Eigen::VectorXd>* level_sq = &block_sumsq;
  std::vector<Eigen::VectorXd> tmp_sum, tmp_sq;
  while (level_sum->size() > 1) {
    const std::size_t half = (level_sum->size() + 1) / 2;
    tmp_sum.assign(half, Eigen::VectorXd());
    tmp_sq.assign(half, Eigen::VectorXd());
    for (std::size_t i = 0; i < half; ++i) {
      if (2 * i + 1 < level_sum->size()) {
        tmp_sum[i] = (*level_sum)[2 * i] + (*level_sum)[2 * i + 1];
        tmp_sq[i] = (*level_sq)[2 * i] + (*level_sq)[2 * i + 1];
      } else {
        tmp_sum[i] = (*level_sum)[2 * i];
        tmp_sq[i] = (*level_sq)[2 * i];
      }
    }
    block_sum.swap(tmp_sum);
    block_sumsq.swap(tmp_sq);
    level_sum = &block_sum;
    level_sq = &block_sumsq;
  }

  BlockedMoments out;
  out.sum = block_sum[0];
  out.sumsq = block_sumsq[0];
  out.count = count;
  return out;
}

}  // namespace recovery
