#pragma once

#include <cstddef>
#include <functional>

namespace lumispec {

/// Worker count: `requested` if > 0, else hardware concurrency, capped by LUMISPEC_THREADS.
unsigned worker_count(unsigned requested = 0);

/// Runs body(i) for i in [0, n) on up to `workers` threads. Each index is visited exactly once;
/// the first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, unsigned workers = 0);

}  // namespace lumispec
