#pragma once

#include <cstddef>
#include <functional>

namespace janossy {

/// Process-wide worker count used by block assembly and verification sweeps.
/// Values below 1 are clamped to 1.
void set_thread_count(int threads);
int thread_count();

/// Runs body(i) for i in [0, count). Indices are split into fixed contiguous
/// chunks, so each index always runs exactly once and results written to
/// per-index slots do not depend on the thread count. Calls made from inside
/// a worker run inline. An exception from the lowest-numbered failing chunk is
/// rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace janossy
