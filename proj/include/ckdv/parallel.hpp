#pragma once

#include <cstddef>
#include <functional>

namespace ckdv {

/// Worker count: CKDV_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
int worker_count();

/// Calls body(i) for i in [0, n) across worker_count() threads. Each index
/// runs exactly once; callers write results into slot i so that reductions
/// can be done afterwards in index order. The first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace ckdv
