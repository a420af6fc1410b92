#pragma once

#include <cstddef>
#include <functional>

namespace hermicop {

/// Worker cap: HERMICOP_THREADS when set (>=1), hardware concurrency otherwise.
int max_threads();

/// Run fn(0..n-1) across up to max_threads() workers. Each index must write
/// only its own outputs; results are then independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace hermicop
