#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace stratwave {

// Worker count used when callers pass jobs <= 0. Initialised from
// STRATWAVE_JOBS, falling back to the hardware concurrency.
int default_jobs();
void set_default_jobs(int jobs);

// Runs body(i) for i in [0, n). Each index is visited exactly once; callers
// write results into per-index slots so the reduction order stays fixed.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, int jobs = 0);

template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F&& fn, int jobs = 0) {
  std::vector<T> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = fn(i); }, jobs);
  return out;
}

}  // namespace stratwave
