#pragma once

#include <cstddef>
#include <functional>

namespace pabisim {

/// Worker cap: PABISIM_THREADS when set (>= 1), else hardware concurrency.
unsigned worker_count();

/// Runs fn(0..n-1), chunked over worker threads. Results must be written to
/// disjoint slots; the partition of indices is deterministic, so output is
/// identical to a sequential run whenever fn is pure per index.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace pabisim
