#pragma once

#include <cstddef>
#include <functional>
#include <stop_token>

namespace dialogsynth {

/// Runs `task(i)` for i in [0, n) on up to `workers` threads. Indices are
/// handed out in increasing order. Once `stop` is requested no new index is
/// started; in-flight tasks finish. The first exception thrown by a task is
/// rethrown after all workers join. Returns the number of tasks started.
std::size_t run_indexed(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& task,
                        std::stop_token stop = {});

}  // namespace dialogsynth
