#pragma once

#include <cstddef>
#include <functional>

namespace ulamtent {

/// Environment variable holding the worker-thread count.
inline constexpr const char* kThreadsEnv = "ULAMTENT_THREADS";

/// Worker threads used by parallel_for: the override if set, else
/// ULAMTENT_THREADS, else std::thread::hardware_concurrency().
int thread_count();

/// Overrides the thread count for this process; 0 restores the default.
void set_thread_count(int threads);

/// Runs body(i) for i in [0, n) over contiguous chunks. Each index is
/// visited exactly once; callers write results to slot i only, so the
/// outcome does not depend on the number of threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace ulamtent
