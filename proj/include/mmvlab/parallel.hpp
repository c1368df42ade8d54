#pragma once

#include <cstddef>
#include <functional>

namespace mmvlab {

/// Worker count: MMVLAB_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Bodies
/// write to their own slots, so results do not depend on scheduling. The
/// first exception thrown by a body is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace mmvlab
