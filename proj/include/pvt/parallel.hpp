#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace pvt {

/// Number of worker threads used for replicate loops. Zero means "use the
/// hardware concurrency".
struct Parallelism {
  unsigned threads = 0;

  unsigned resolved() const {
    if (threads != 0) return threads;
    return std::max(1u, std::thread::hardware_concurrency());
  }
};

/// Evaluates `fn(i)` for i in [0, n) and stores the results by index, so the
/// output never depends on scheduling. `fn` must be safe to call concurrently
/// for distinct indices.
template <typename Result, typename Fn>
std::vector<Result> parallel_map(std::size_t n, Fn&& fn, Parallelism par = {}) {
  std::vector<Result> out(n);
  const std::size_t workers = std::min<std::size_t>(par.resolved(), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < n; i += workers) out[i] = fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace pvt
