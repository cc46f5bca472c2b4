#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

namespace qbattery {

template <typename Fn>
auto ordered_parallel_map(std::size_t n, Fn&& f) -> std::vector<decltype(f(std::size_t{}))> {
  using Result = decltype(f(std::size_t{}));
  std::vector<std::optional<Result>> slots(n);
  const unsigned threads = std::min<std::size_t>(worker_threads(), n);

  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) slots[i].emplace(f(i));
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < n; i = next++) slots[i].emplace(f(i));
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  std::vector<Result> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace qbattery
