#pragma once

#include <cstddef>
#include <functional>

namespace slicedot {

/// Worker cap: SLICEDOT_THREADS if set and positive, else hardware concurrency.
std::size_t max_threads();

/// Runs body(i) for i in [0, n) on up to max_threads() threads. Each index is
/// processed exactly once; callers write results into per-index slots and
/// reduce afterwards in index order, so output never depends on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace slicedot
