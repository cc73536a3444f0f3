#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

namespace jcone {

std::uint64_t splitmix64(std::uint64_t x);

/// Independent generator for one chunk of one experiment. The stream depends
/// only on (seed, stream, chunk), never on the thread that consumes it.
std::mt19937_64 chunk_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t chunk);

/// Worker count used when --jobs is not given.
int default_jobs();

struct ChunkPlan {
  std::uint64_t total = 0;
  std::uint64_t chunk_size = 4096;

  std::uint64_t chunks() const { return (total + chunk_size - 1) / chunk_size; }
  std::uint64_t begin(std::uint64_t c) const { return c * chunk_size; }
  std::uint64_t count(std::uint64_t c) const {
    std::uint64_t b = begin(c);
    return total - b < chunk_size ? total - b : chunk_size;
  }
};

/// Runs body(chunk_index, count) -> Acc over all chunks on `jobs` threads and
/// folds the results with Acc::merge in chunk order, so the answer does not
/// depend on `jobs`.
template <class Acc, class Body>
Acc run_chunks(const ChunkPlan& plan, int jobs, Body body) {
  const std::uint64_t n = plan.chunks();
  std::vector<Acc> parts(n);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      std::uint64_t c = next.fetch_add(1);
      if (c >= n) return;
      try {
        parts[c] = body(c, plan.count(c));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  int threads = jobs < 1 ? 1 : jobs;
  if (static_cast<std::uint64_t>(threads) > n) threads = static_cast<int>(n ? n : 1);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  Acc total{};
  for (auto& p : parts) total.merge(p);
  return total;
}

/// Running sums of several real observables.
struct MeanAcc {
  std::uint64_t n = 0;
  std::vector<double> sum;
  std::vector<double> sumsq;

  explicit MeanAcc(std::size_t k = 0) : sum(k, 0.0), sumsq(k, 0.0) {}

  void add(std::size_t i, double v) {
    sum[i] += v;
    sumsq[i] += v * v;
  }
  void merge(const MeanAcc& o) {
    if (sum.empty()) {
      sum.assign(o.sum.size(), 0.0);
      sumsq.assign(o.sumsq.size(), 0.0);
    }
    n += o.n;
    for (std::size_t i = 0; i < o.sum.size(); ++i) {
      sum[i] += o.sum[i];
      sumsq[i] += o.sumsq[i];
    }
  }
  double mean(std::size_t i) const { return n ? sum[i] / static_cast<double>(n) : 0.0; }
  /// Standard error of the mean.
  double se(std::size_t i) const {
    if (n < 2) return 0.0;
    double m = mean(i);
    double var = (sumsq[i] - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
    return std::sqrt(var > 0 ? var / static_cast<double>(n) : 0.0);
  }
};

}  // namespace jcone
