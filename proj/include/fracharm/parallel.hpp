#pragma once

#include <cstddef>
#include <functional>

namespace fracharm {

// Worker count: FRACHARM_THREADS when set to a positive integer, otherwise the
// hardware concurrency (at least 1).
unsigned worker_count();

// Runs body(i) for i in [0, n). Iterations are distributed over worker_count()
// threads in contiguous blocks; body must only write to per-index state.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fracharm
