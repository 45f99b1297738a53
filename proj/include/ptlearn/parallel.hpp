#pragma once

#include <functional>

namespace ptlearn {

// Default worker count: PTLEARN_THREADS env var, else hardware concurrency.
int default_thread_count();

// Runs body(i) for i in [begin, end), split into contiguous blocks across
// up to `threads` workers. Serial when threads <= 1. The first exception
// thrown by any worker is rethrown on the calling thread.
void parallel_for(int begin, int end, int threads, const std::function<void(int)>& body);

}  // namespace ptlearn
