#pragma once

#include <cstddef>
#include <functional>

namespace nil3 {

// Worker count: hardware concurrency, capped by the NIL3_THREADS environment variable.
int thread_count();

// Calls body(i) for i in [0, n). Each index is visited exactly once; any
// reduction must be done by the caller in index order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace nil3
