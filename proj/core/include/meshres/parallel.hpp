#pragma once

#include <cstddef>
#include <functional>

namespace meshres {

// Worker count: MESHRES_THREADS if set to a positive integer, otherwise the
// hardware concurrency.
std::size_t thread_count();

// Calls fn(i) for every i in [0, n). Work is claimed dynamically, so fn
// must only write to state owned by index i. Exceptions from workers are
// rethrown on the calling thread (the first one wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace meshres
