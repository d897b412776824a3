#pragma once

#include <cstddef>
#include <functional>
#include <optional>

namespace rocarc {

/// Thread count from an explicit request, then $ROCARC_THREADS, then 1.
int resolve_threads(std::optional<int> requested);

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Tasks must write
/// disjoint outputs; the first exception is rethrown after all workers join.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace rocarc
