#pragma once

#include <cstddef>
#include <functional>

namespace cointsearch {

/// Worker count: `requested` when positive, else COINTSEARCH_THREADS, else the hardware count.
int resolve_threads(int requested = 0);

/// Calls fn(i) for i in [0, n) on up to `threads` workers. Each index is visited exactly once;
/// callers write results into per-index slots so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace cointsearch
