#pragma once

// Index-parallel map kernels. seq:: is the serial reference kept for
// testing; par:: distributes the same loop with OpenMP. Both return results
// in index order, so output never depends on the schedule.

#include <cstddef>
#include <exception>
#include <type_traits>
#include <vector>

#include <omp.h>

namespace tiltsense {

namespace seq {

template <class F>
auto map_indexed(std::size_t n, F&& f) {
  using R = std::invoke_result_t<F&, std::size_t>;
  std::vector<R> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = f(i);
  }
  return out;
}

}  // namespace seq

namespace par {

/// threads <= 0 uses the OpenMP default team size.
template <class F>
auto map_indexed(std::size_t n, F&& f, int threads = 0) {
  using R = std::invoke_result_t<F&, std::size_t>;
  std::vector<R> out(n);
  std::exception_ptr failure;
  const int team = threads > 0 ? threads : omp_get_max_threads();
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(team)
  for (long long i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(tiltsense_map_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
  return out;
}

}  // namespace par

}  // namespace tiltsense
