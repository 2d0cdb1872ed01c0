#include "levyito/mc_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "levyito/errors.hpp"

namespace levyito {

namespace {

constexpr int kBlockSize = 1024;

struct KahanAcc {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

std::vector<Estimate> run_paths(const McConfig& config, int n_outputs,
                                const PathFunctional& functional) {
  if (config.n_paths < 1) throw ConfigError("run_paths: n_paths must be >= 1");
  if (n_outputs < 1) throw ConfigError("run_paths: n_outputs must be >= 1");
  const int n = config.n_paths;
  const int n_blocks = (n + kBlockSize - 1) / kBlockSize;
  const std::size_t width = static_cast<std::size_t>(n_outputs);

  // Per-block partial sums of x and x^2, indexed by block; workers claim
  // blocks from a shared counter but the final in-order reduction makes the
  // result independent of who computed what.
  std::vector<std::vector<KahanAcc>> block_sum(
      static_cast<std::size_t>(n_blocks), std::vector<KahanAcc>(width));
  std::vector<std::vector<KahanAcc>> block_sum2(
      static_cast<std::size_t>(n_blocks), std::vector<KahanAcc>(width));

  std::atomic<int> next_block{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    std::vector<double> out(width);
    try {
      for (;;) {
        const int b = next_block.fetch_add(1);
        if (b >= n_blocks) return;
        const int lo = b * kBlockSize;
        const int hi = std::min(n, lo + kBlockSize);
        auto& s1 = block_sum[static_cast<std::size_t>(b)];
        auto& s2 = block_sum2[static_cast<std::size_t>(b)];
        for (int i = lo; i < hi; ++i) {
          std::fill(out.begin(), out.end(), 0.0);
          functional(
              PathRng{config.master_seed, static_cast<std::uint64_t>(i)}, out);
          for (std::size_t j = 0; j < width; ++j) {
            if (!std::isfinite(out[j]))
              throw NumericsError("run_paths: non-finite path output");
            s1[j].add(out[j]);
            s2[j].add(out[j] * out[j]);
          }
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
      next_block.store(n_blocks);
    }
  };

  int workers = config.worker_hint > 0
                    ? config.worker_hint
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, n_blocks));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::vector<Estimate> result(width);
  for (std::size_t j = 0; j < width; ++j) {
    KahanAcc s1, s2;
    for (int b = 0; b < n_blocks; ++b) {
      s1.add(block_sum[static_cast<std::size_t>(b)][j].sum);
      s2.add(block_sum2[static_cast<std::size_t>(b)][j].sum);
    }
    const double mean = s1.sum / n;
    double var = 0.0;
    if (n > 1) var = std::max(0.0, (s2.sum - n * mean * mean) / (n - 1));
    result[j] = {mean, std::sqrt(var / n), static_cast<std::size_t>(n)};
  }
  return result;
}

Estimate run_paths_scalar(const McConfig& config,
                          const std::function<double(const PathRng&)>& f) {
  auto wrapped = [&f](const PathRng& rng, std::vector<double>& out) {
    out[0] = f(rng);
  };
  return run_paths(config, 1, wrapped)[0];
}

}  // namespace levyito
