#pragma once

#include <cstddef>
#include <functional>

namespace renormlab {

/// Worker count: RENORMLAB_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
std::size_t worker_count();

/// Calls body(i) for i in [0, n). Work is split into contiguous chunks; results
/// must be written to per-index slots so output is independent of scheduling.
/// The exception from the lowest failing chunk is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace renormlab
