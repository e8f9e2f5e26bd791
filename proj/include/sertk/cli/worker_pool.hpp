#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace sertk::cli {

inline std::size_t default_jobs() { return std::max<std::size_t>(1, std::thread::hardware_concurrency()); }

// Calls fn(i) for every i in [0, n) on at most `jobs` threads (0 = one per
// logical core). Work items must write to disjoint outputs. If any item
// throws, the exception from the lowest index is rethrown after all threads
// finish, so failures are reported the same way for every thread count.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn) {
  if (n == 0) return;
  if (jobs == 0) jobs = default_jobs();
  jobs = std::min(jobs, n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(jobs);
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace sertk::cli
