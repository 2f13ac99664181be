#pragma once

#include <cstddef>
#include <functional>

namespace tclab {

// Runs body(i) for i in [0, n) on `workers` threads with static contiguous
// chunking. Each index writes only its own output slot, so results do not
// depend on the worker count. The first exception thrown by any worker is
// rethrown after the join.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body);

// TCLAB_WORKERS env var, else hardware concurrency.
int default_worker_count();

}  // namespace tclab
