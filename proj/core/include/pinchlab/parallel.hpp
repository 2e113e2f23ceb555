#pragma once

#include <cstddef>
#include <functional>

namespace pinchlab {

// Worker count: PINCHLAB_THREADS if set and positive, else hardware concurrency.
std::size_t thread_count();

// Runs body(i) for i in [0, n) across thread_count() workers. Each index is
// visited exactly once; callers write results into per-index slots so the
// outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace pinchlab
