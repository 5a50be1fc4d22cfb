#pragma once

#include <functional>

namespace trspec {

// Number of worker threads: TRSPEC_THREADS when set (clamped to at least 1),
// otherwise the hardware concurrency.
int worker_count();

// Runs fn(i) for i in [0, n) on the worker pool. Results must be written to
// preallocated slots indexed by i so the outcome is deterministic regardless
// of scheduling. The first exception thrown by any worker is rethrown.
void parallel_for(int n, const std::function<void(int)>& fn);

} // namespace trspec
