#pragma once

#include <cstddef>
#include <functional>

namespace rdo {

/// Number of workers used when a config asks for 0 ("auto").
std::size_t default_workers();

/// Runs body(i) for i in [0, n) over `workers` threads with static chunking.
/// Results must be written to per-index slots; the first exception thrown by
/// any worker is rethrown after all workers join.
void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace rdo
