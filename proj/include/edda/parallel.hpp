#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace edda {

// Runs fn(i) for i in [0, n) across OpenMP threads. Each index must write
// only its own output slot. The first exception thrown by any iteration is
// rethrown on the calling thread after the loop.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  std::exception_ptr error;
  std::mutex error_mutex;
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace edda
