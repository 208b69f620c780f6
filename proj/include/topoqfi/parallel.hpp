#pragma once

#include <exception>

namespace topoqfi {

// Parallel map over [0, n): bodies write to disjoint preallocated slots, so
// results are identical for any thread count.  Final reductions stay
// sequential in the callers to keep outputs byte-reproducible.
template <class F>
void parallel_for_index(int n, F&& body) {
  std::exception_ptr error;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace topoqfi
