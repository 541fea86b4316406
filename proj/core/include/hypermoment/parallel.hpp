#pragma once

#include <cstddef>
#include <functional>

namespace hypermoment {

// Worker count: HYPERMOMENT_THREADS when set to a positive integer, otherwise
// the hardware concurrency (at least 1).
int worker_count();

// Runs body(i) for i in [0, n) on up to worker_count() threads. The first
// exception thrown by any worker is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace hypermoment
