#pragma once

#include <cstddef>
#include <functional>

namespace textcausal {

// Number of worker threads to use when the caller passes 0.
std::size_t default_thread_count();

// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
// executed exactly once; callers write results into per-index slots so the
// outcome never depends on scheduling. The first exception thrown by any
// task is rethrown after all workers join.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace textcausal
