#pragma once

#include <cstddef>
#include <functional>

namespace hsharp {

/// Worker threads used by parallel_for: HLP_SHARP_THREADS when set to a
/// positive integer, otherwise the hardware concurrency (at least 1).
int worker_count();

/// Calls body(i) for i in [0, count), indices handed out dynamically. The
/// caller writes results into per-index slots so that any reduction done
/// afterwards is independent of scheduling. Calls made from inside a
/// worker run serially. An exception thrown by body stops the loop and is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace hsharp
