#pragma once

#include <cstddef>
#include <functional>

namespace bvres {

// Worker count from BVRES_THREADS, else the hardware concurrency.
unsigned thread_count();

// Runs fn(i) for i in [0, n) on thread_count() workers. Results must be
// written by index; exceptions from fn are rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace bvres
