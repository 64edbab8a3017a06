#pragma once

#include <cstddef>
#include <functional>

namespace asymlab {

/// Worker count from ASYMLAB_THREADS (0 or unset = hardware concurrency).
unsigned thread_count();

/// Runs body(begin, end) over contiguous chunks of [0, n). Each index is
/// visited exactly once; chunks never share output slots, so results are
/// independent of the schedule as long as body writes only to its own range.
void parallel_for(std::size_t n, std::size_t min_chunk,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace asymlab
