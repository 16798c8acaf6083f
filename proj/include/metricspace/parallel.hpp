#pragma once

#include <cstddef>
#include <functional>

namespace metricspace {

/// Worker count: METRICSPACE_THREADS when set to a positive integer,
/// otherwise the hardware concurrency (at least 1).
unsigned thread_cap();

/// Runs fn(0) ... fn(count-1), possibly concurrently. Callers store results
/// by index so output never depends on scheduling. If any call throws, the
/// exception from the lowest failing index is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace metricspace
