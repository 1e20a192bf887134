#ifndef HOP_PARALLEL_HPP
#define HOP_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hop {

/// Worker count: 0 means one per hardware thread.
inline unsigned resolve_workers(unsigned workers) {
  if (workers > 0) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(trial) for trial = 0..trials-1 and returns the results in trial
/// order. Trials are claimed dynamically, so the results are independent of
/// the worker count as long as fn depends only on its argument. The first
/// exception thrown by any trial is rethrown.
template <typename F>
auto map_trials(std::uint64_t trials, unsigned workers, F&& fn)
    -> std::vector<decltype(fn(std::uint64_t{}))> {
  using R = decltype(fn(std::uint64_t{}));
  std::vector<R> out(trials);
  const unsigned w = std::min<std::uint64_t>(resolve_workers(workers), std::max<std::uint64_t>(trials, 1));
  if (w <= 1) {
    for (std::uint64_t t = 0; t < trials; ++t) out[t] = fn(t);
    return out;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto body = [&] {
    while (true) {
      const std::uint64_t t = next.fetch_add(1);
      if (t >= trials) return;
      try {
        out[t] = fn(t);
      } catch (...) {
        std::lock_guard lk(err_mu);
        if (!err) err = std::current_exception();
        next = trials;
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < w; ++i) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace hop

#endif  // HOP_PARALLEL_HPP
