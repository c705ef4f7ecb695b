#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace holv {

// Worker count for batch jobs: HOLV_THREADS if set and positive, otherwise
// the hardware concurrency, never more than the number of jobs.
int worker_count(std::size_t jobs);

// Runs body(i) for i in [0, count). Every index writes only its own output
// slot, so the merged result is independent of the schedule. The first
// exception thrown by any job is rethrown after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace holv
