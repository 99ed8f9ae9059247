#pragma once

#include <cstddef>
#include <functional>

namespace thermo {

/// Worker count: THERMO_THREADS if set and positive, else the hardware concurrency.
std::size_t thread_count();

/// Runs body(begin, end) over contiguous chunks of [0, n).  Chunk boundaries
/// depend only on n and min_chunk, never on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 4096);

}  // namespace thermo
