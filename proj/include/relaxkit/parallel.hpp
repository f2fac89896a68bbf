#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace relaxkit {

// Worker count: RELAXKIT_THREADS if set to a positive integer, otherwise the
// hardware concurrency.
int thread_count();

// out[i] = f(i) for i < n. Work is split into contiguous blocks; the result does
// not depend on the thread count. The first exception by index is rethrown.
std::vector<double> parallel_map(std::size_t n, const std::function<double(std::size_t)>& f);

}  // namespace relaxkit
