#pragma once

#include <cstddef>
#include <functional>

namespace nilspec {

/// Worker count: NILSPEC_THREADS when set and positive, else hardware concurrency.
unsigned thread_count();

/// Runs f(i) for i in [0, n) on up to thread_count() threads. Results must be
/// written to per-index slots by f so callers can merge in index order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

}  // namespace nilspec
