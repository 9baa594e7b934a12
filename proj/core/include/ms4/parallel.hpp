#pragma once

#include <cstddef>
#include <functional>

namespace ms4 {

// Number of worker threads used by parallel_for. Defaults to the hardware
// concurrency; 1 disables threading.
unsigned worker_count();
void set_worker_count(unsigned n);

// Calls body(k) for k in [0, n). Work is split into contiguous blocks; each
// k is visited exactly once, so writes to distinct slots are race-free and
// results are independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace ms4
