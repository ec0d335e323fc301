#pragma once

#include <cstddef>
#include <functional>

namespace runclust {

/// Number of workers to use for a request of `requested` (0 = hardware).
unsigned resolve_workers(unsigned requested);

/// Calls fn(index, worker) for every index in [0, count) on a bounded pool.
/// Indices are claimed dynamically; callers must write results by index so
/// that output does not depend on scheduling. The first exception thrown by
/// any call is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t, unsigned)>& fn);

}  // namespace runclust
