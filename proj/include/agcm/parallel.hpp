#pragma once

#include <cstddef>
#include <functional>

namespace agcm {

// Worker threads to use: AGCM_THREADS when set to a positive integer, else the
// hardware concurrency, and at least 1.
unsigned worker_count();

// Runs fn(i) for i in [0, count) across worker_count() threads. Indices are
// dealt round-robin; callers write results into disjoint per-index slots, so
// the thread count cannot affect any output. The first exception thrown by fn
// is rethrown on the calling thread after all workers join.
void parallel_for_index(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace agcm
