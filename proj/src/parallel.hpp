#pragma once

// Index-parallel loops for the dictionary sweeps. Each index writes only its
// own slot, and callers fold the slots in index order, so results do not
// depend on scheduling.

#include "rikit/report.hpp"

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rikit::detail {

template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::size_t error_index = n;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          // Keep the lowest failing index so the reported error is stable.
          std::lock_guard<std::mutex> lock(error_mutex);
          if (i < error_index) {
            error_index = i;
            error = std::current_exception();
          }
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Folds per-item reports as if their samples had been observed in order.
inline ConstantReport fold_reports(const std::vector<ConstantReport>& parts) {
  ConstantReport out;
  for (const auto& r : parts)
    if (r.constant > out.constant || (out.argmax_function_label.empty() && r.constant == out.constant &&
                                      !r.argmax_function_label.empty())) {
      out.constant = r.constant;
      out.argmax_function_label = r.argmax_function_label;
      out.argmax_t = r.argmax_t;
    }
  return out;
}

}  // namespace rikit::detail
