#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace kdvb {

// Static contiguous chunking of [0, count). fn(begin, end) must only write
// to slots it owns, so results never depend on the thread count.
template <class F>
void parallel_chunks(int count, int threads, F&& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    if (count > 0) fn(0, count);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int t = 0; t < threads; ++t) {
    const int b = static_cast<int>(static_cast<long long>(count) * t / threads);
    const int e = static_cast<int>(static_cast<long long>(count) * (t + 1) / threads);
    pool.emplace_back([&, b, e, t] {
      try {
        fn(b, e);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace kdvb
