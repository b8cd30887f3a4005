#pragma once

#include <cstddef>
#include <functional>

namespace vortexpair {

// Worker count: VPL_THREADS if set and positive, otherwise hardware concurrency.
unsigned thread_budget();

// Runs body(k) for k in [0, n). Each index is handled by exactly one worker, so
// results written per index are identical for every thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace vortexpair
