#pragma once

#include <cstddef>
#include <functional>

namespace camsim {

/// Worker cap: CAMSIM_THREADS if set and positive, else hardware concurrency.
std::size_t worker_count();

/// Runs fn(i) for i in [0, n) across up to worker_count() threads. Calls made
/// from inside another parallel_for run serially. Callers must write only to
/// disjoint per-index state so results do not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace camsim
