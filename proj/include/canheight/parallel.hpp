#pragma once

// Deterministic parallel map: out[i] = f(in[i]) regardless of thread count or
// scheduling.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace canheight {

inline unsigned default_jobs() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

/// Applies f to every element with up to `jobs` worker threads. The first
/// exception (by index) is rethrown after all workers finish.
template <class T, class Fn>
auto parallel_map(const std::vector<T>& in, Fn&& f, unsigned jobs) {
  using R = decltype(f(in.front()));
  std::vector<R> out(in.size());
  std::vector<std::exception_ptr> errors(in.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < in.size();) {
      try {
        out[i] = f(in[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(in.size(), 1))));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < jobs; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace canheight
