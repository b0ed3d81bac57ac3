#pragma once

#include <cstddef>
#include <functional>

namespace pandora {

/// Worker count: set_thread_count() override, else $PANDORA_THREADS, else
/// the hardware concurrency. Always at least 1.
std::size_t thread_count();

/// 0 clears the override.
void set_thread_count(std::size_t n);

/// Runs body(i) for i in [0, n). Each index is visited exactly once; callers
/// write results into per-index slots so output never depends on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace pandora
