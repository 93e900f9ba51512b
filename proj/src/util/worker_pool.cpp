#include "dialogsynth/util/worker_pool.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dialogsynth {

std::size_t run_indexed(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& task,
                        std::stop_token stop) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> started{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto body = [&] {
    while (!stop.stop_requested()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      started.fetch_add(1);
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };

  if (workers == 1) {
    body();
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(body);
  }
  if (first_error) std::rethrow_exception(first_error);
  return started.load();
}

}  // namespace dialogsynth
