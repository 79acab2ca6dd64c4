#pragma once

#include <cstddef>
#include <functional>

namespace dmx {

// Number of worker threads: DMX_NUM_THREADS if set, else 1.
// Results are bit-identical for any thread count: workers write disjoint
// output slots and every reduction is performed sequentially by the caller.
int num_threads();

// fn(begin, end) over a partition of [0, n)
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace dmx
