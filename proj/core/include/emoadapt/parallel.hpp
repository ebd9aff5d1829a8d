#pragma once

#include <cstddef>
#include <functional>

namespace emoadapt {

// Worker cap. Read once from EMOADAPT_THREADS; defaults to the hardware
// concurrency. set_max_threads overrides it for the current process.
std::size_t max_threads();
void set_max_threads(std::size_t n);

// Runs fn(i) for i in [0, count) over contiguous static chunks. Callers must
// make each index write disjoint memory so results do not depend on the
// thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace emoadapt
