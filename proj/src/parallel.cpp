#include "darrl/parallel.hpp"

#include <algorithm>
#include <exception>
#include <mutex>

#include <omp.h>

namespace darrl {

std::vector<NodeId> find_abstract_batch(const Cat& cat, const std::vector<State>& states) {
    std::vector<NodeId> out(states.size());
    const auto n = static_cast<std::ptrdiff_t>(states.size());
    std::exception_ptr failure;
    std::mutex failure_mutex;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = cat.find_abstract(states[static_cast<std::size_t>(i)]);
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return out;
}

std::vector<NodeId> find_abstract_batch_serial(const Cat& cat, const std::vector<State>& states) {
    std::vector<NodeId> out;
    out.reserve(states.size());
    for (const State& s : states) {
        out.push_back(find_abstract_linear(cat, s));
    }
    return out;
}

int worker_count(int requested, std::size_t jobs) {
    const int base = requested > 0 ? requested : omp_get_max_threads();
    return std::max(1, std::min(base, static_cast<int>(std::max<std::size_t>(jobs, 1))));
}

void parallel_for_jobs(std::size_t jobs, int workers, const std::function<void(std::size_t)>& job) {
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto n = static_cast<std::ptrdiff_t>(jobs);
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count(workers, jobs))
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            job(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace darrl
