#include "mvdepth/parallel.hpp"

#include <atomic>
#include <future>
#include <thread>
#include <vector>

namespace mvd {

namespace {
std::atomic<int> g_threads{0};

double pairwise_sum_seq(const double* v, size_t n) {
  // Below this size a plain left-to-right sum is used; the cutoff is part
  // of the deterministic reduction structure, not a tuning knob.
  if (n <= 32) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const size_t half = n / 2;
  return pairwise_sum_seq(v, half) + pairwise_sum_seq(v + half, n - half);
}

double pairwise_sum_par(const double* v, size_t n, int depth) {
  if (n <= 4096 || depth <= 0)
    return pairwise_sum_seq(v, n);
  const size_t half = n / 2;
  auto lo = std::async(std::launch::async, pairwise_sum_par, v, half, depth - 1);
  const double hi = pairwise_sum_par(v + half, n - half, depth - 1);
  return lo.get() + hi;
}
}  // namespace

void set_thread_count(int n) { g_threads.store(n < 0 ? 0 : n); }

int thread_count() {
  int n = g_threads.load();
  if (n == 0) {
    n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
  }
  return n;
}

void parallel_for(int begin, int end, const std::function<void(int)>& fn) {
  const int count = end - begin;
  if (count <= 0) return;
  const int workers = std::min(thread_count(), count);
  if (workers <= 1) {
    for (int i = begin; i < end; ++i) fn(i);
    return;
  }
  std::atomic<int> next{begin};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= end) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

double pairwise_sum(std::span<const double> values) {
  const int depth = values.size() > 1u << 16 ? 3 : 0;
  if (depth > 0 && thread_count() > 1)
    return pairwise_sum_par(values.data(), values.size(), depth);
  return pairwise_sum_seq(values.data(), values.size());
}

}  // namespace mvd
