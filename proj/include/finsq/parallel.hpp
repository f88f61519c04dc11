#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace finsq {

/// Worker count: FINSQ_THREADS if set and positive, otherwise the hardware concurrency.
unsigned worker_count();

/// Runs fn(i) for i in [0, count) on up to worker_count() threads. The first exception is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

/// Results land at their own index, so the output does not depend on scheduling.
template <class R, class F>
std::vector<R> parallel_map(std::size_t count, F&& fn) {
  std::vector<R> out(count);
  parallel_for(count, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace finsq
