#pragma once

#include <cstddef>
#include <functional>

namespace spnjd {

/// Worker count from SPNJD_WORKERS, else the hardware concurrency (>= 1).
std::size_t worker_count();

/// Calls body(i) for i in [0, n) on up to `workers` threads. Results must
/// be written by index; the first exception (lowest index) is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, std::size_t workers = worker_count());

}  // namespace spnjd
