#include "kfree/numeric.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

namespace kfree {

namespace {
int g_threads = 0;  // 0 = not set, fall back to env / hardware
}

int thread_count() {
  if (g_threads > 0) return g_threads;
  if (const char* env = std::getenv("KFREE_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? int(hw) : 1;
}

void set_thread_count(int n) { g_threads = n; }

void for_each_chunk(std::uint64_t count, std::uint64_t chunk_size,
                    const std::function<double(std::uint64_t, std::uint64_t,
                                               std::uint64_t)>& fn,
                    const std::function<void(std::uint64_t, double)>& sink) {
  if (count == 0) return;
  if (chunk_size == 0) chunk_size = count;
  std::uint64_t nchunks = (count + chunk_size - 1) / chunk_size;

  auto run = [&](std::uint64_t i) {
    std::uint64_t b = i * chunk_size;
    std::uint64_t e = std::min(count, b + chunk_size);
    return fn(i, b, e);
  };

  int threads = std::min<std::uint64_t>(thread_count(), nchunks);
  if (threads <= 1) {
    for (std::uint64_t i = 0; i < nchunks; ++i) sink(i, run(i));
    return;
  }

  // Partials stored by chunk index and combined in order, so the result is
  // identical for any thread count.
  std::vector<double> partials(nchunks);
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (;;) {
        std::uint64_t i = next.fetch_add(1);
        if (i >= nchunks) return;
        partials[i] = run(i);
      }
    });
  for (auto& th : pool) th.join();
  for (std::uint64_t i = 0; i < nchunks; ++i) sink(i, partials[i]);
}

double chunked_sum(std::uint64_t count, std::uint64_t chunk_size,
                   const std::function<double(std::uint64_t, std::uint64_t,
                                              std::uint64_t)>& chunk_fn) {
  Kahan acc;
  for_each_chunk(count, chunk_size, chunk_fn,
                 [&](std::uint64_t, double v) { acc.add(v); });
  return acc.value();
}

}  // namespace kfree
