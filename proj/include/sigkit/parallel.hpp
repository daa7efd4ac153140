#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace sigkit {

struct Parallelism {
  unsigned threads = 1;
};

/// Hardware concurrency, or 1 when unknown.
inline unsigned default_thread_count() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Runs body(task, worker) for task in [0, tasks), spreading tasks round
/// robin over min(threads, tasks) workers. The first exception thrown by a
/// worker is rethrown after all workers have joined.
template <class Body>
void parallel_for(std::size_t tasks, Parallelism par, Body&& body) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(par.threads, tasks));
  if (workers == 1) {
    for (std::size_t t = 0; t < tasks; ++t) body(t, std::size_t{0});
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t t = w; t < tasks; t += workers) body(t, w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace sigkit
