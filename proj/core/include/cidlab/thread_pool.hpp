#pragma once

#include <functional>

namespace cidlab {

/// Runs fn(0..n_tasks-1) across up to `threads` workers (0 selects the
/// hardware concurrency).  Blocks until every task finished; the first
/// exception thrown by a task is rethrown after all workers join.  Task
/// outputs must go to caller-preallocated slots so results are independent
/// of scheduling.
void parallel_for_tasks(int threads, int n_tasks, const std::function<void(int)>& fn);

}  // namespace cidlab
