#pragma once

#include <cstdint>
#include <functional>

namespace vdtk {

// Process-wide worker budget, settable from the CLI (`--threads`).
// Outputs must not depend on it: parallel loops only ever write disjoint
// slots, and reductions are combined sequentially in index order.
void set_thread_budget(int threads);
int thread_budget();

// Runs fn(i) for i in [0, n). Work is chunked contiguously; each index is
// executed exactly once regardless of the budget.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn);

}  // namespace vdtk
