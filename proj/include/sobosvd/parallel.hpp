#pragma once

#include <cstddef>
#include <functional>

namespace sobosvd {

// Worker count used for independent per-mode work. Defaults to 1.
void set_thread_count(std::size_t n);
std::size_t thread_count();

// Runs fn(0..n-1), spreading iterations over thread_count() workers.
// Exceptions from workers are rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace sobosvd
