#pragma once

#include <functional>

namespace chaoskit {

/// Worker-thread budget: programmatic override, else CHAOSKIT_THREADS, else
/// hardware concurrency. Always at least 1.
int thread_cap();

/// Override the thread budget (0 restores environment/hardware resolution).
void set_thread_cap(int cap);

/// Runs chunk_fn over contiguous subranges of [0, count) on up to
/// thread_cap() threads. Chunks are disjoint, so results must not depend on
/// scheduling as long as chunk_fn writes only to its own range. The first
/// exception thrown inside a chunk is rethrown on the caller's thread.
void parallel_for(int count, const std::function<void(int begin, int end)>& chunk_fn);

}  // namespace chaoskit
