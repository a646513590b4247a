#pragma once

#include <cstddef>
#include <functional>

namespace homcell {

// Worker count: HOMCELL_THREADS if set (>= 1), else hardware concurrency.
unsigned worker_count();

// Runs body(i) for i in [0, n). Work is split into contiguous chunks; the first exception
// thrown by any worker is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace homcell
