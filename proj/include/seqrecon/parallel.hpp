#pragma once

#include <cstddef>
#include <functional>

namespace seqrecon {

/// Worker count: SEQRECON_THREADS if set and positive, else the hardware
/// concurrency (at least 1).
unsigned thread_count();

/// Runs fn(i) for i in [0, n) on up to thread_count() threads. The first
/// exception thrown by any call is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace seqrecon
