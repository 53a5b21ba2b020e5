#pragma once

// OpenMP kernels. Each has a serial reference that the tests and the
// benchmark compare against.

#include <cstddef>
#include <functional>
#include <vector>

#include "darrl/cat.hpp"

namespace darrl {

/// Leaf of every state, by tree descent, split across threads.
std::vector<NodeId> find_abstract_batch(const Cat& cat, const std::vector<State>& states);

/// Reference: linear leaf scan, one state after another.
std::vector<NodeId> find_abstract_batch_serial(const Cat& cat, const std::vector<State>& states);

/// Worker count for `jobs` independent jobs: `requested` if positive, else the
/// OpenMP default, never more than `jobs`.
int worker_count(int requested, std::size_t jobs);

/// Calls job(i) for i in [0, jobs) on a bounded pool. Jobs must not share
/// mutable state. The first exception thrown by any job is rethrown after all
/// workers finish.
void parallel_for_jobs(std::size_t jobs, int workers, const std::function<void(std::size_t)>& job);

}  // namespace darrl
