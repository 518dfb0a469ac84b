#pragma once

#include <cstddef>
#include <functional>

namespace spinmz {

// Runs fn(i) for i in [0, n) on up to `threads` workers. Each item writes
// only to its own output slot, so results are ordered by index and the
// thread count never changes output bytes.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn);

// <= 0 resolves to the hardware concurrency (at least 1).
int resolve_threads(int requested);

}  // namespace spinmz
