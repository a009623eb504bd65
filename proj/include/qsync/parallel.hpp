#pragma once

#include <cstddef>
#include <functional>

namespace qsync {

/// Worker count from QSYNC_WORKERS, else the hardware concurrency (>= 1).
std::size_t worker_count();

/// Calls fn(i) for i in [0, n) across worker_count() threads. Work items
/// must write only to their own output slot. The first exception thrown by
/// any item is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace qsync
