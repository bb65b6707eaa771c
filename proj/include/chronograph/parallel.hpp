#pragma once

#include <cstddef>
#include <functional>

namespace chronograph {

/// Worker cap: CHRONOGRAPH_THREADS when set to a positive integer, otherwise
/// the hardware concurrency.
[[nodiscard]] std::size_t thread_limit();

/// Runs body(i) for i in [0, n), spreading indices over up to thread_limit()
/// threads. The first exception thrown by any body is rethrown after the join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace chronograph
