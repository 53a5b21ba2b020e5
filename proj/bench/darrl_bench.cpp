// Serial reference vs OpenMP kernels: batched leaf lookup and seed-parallel
// training runs.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include <omp.h>

#include "darrl/cat.hpp"
#include "darrl/harness.hpp"
#include "darrl/parallel.hpp"
#include "darrl/rng.hpp"

using namespace darrl;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Cat random_tree(std::size_t target_leaves, Rng& rng) {
    Cat cat = make_cat({{"x", VarKind::integer, 1, 256}, {"y", VarKind::integer, 1, 256}, {"z", VarKind::real, 0, 100}},
                       {});
    while (cat.leaf_count() < target_leaves) {
        const auto& leaves = cat.leaves();
        const NodeId leaf = leaves[uniform_index(rng, leaves.size())];
        const std::size_t var = uniform_index(rng, 3);
        if (splittable(cat.node(leaf).abstraction, var, 2, cat.limits())) cat.refine_leaf(leaf, var, 2);
    }
    return cat;
}

}  // namespace

int main(int argc, char** argv) {
    const std::size_t n_states = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 200000;
    const int n_seeds = argc > 2 ? std::atoi(argv[2]) : 8;
    std::printf("threads available: %d\n", omp_get_max_threads());

    Rng rng(7);
    const Cat cat = random_tree(512, rng);
    std::vector<State> states(n_states);
    for (auto& s : states) {
        s = {1.0 + static_cast<double>(uniform_index(rng, 256)), 1.0 + static_cast<double>(uniform_index(rng, 256)),
             100.0 * uniform01(rng)};
    }

    auto t0 = Clock::now();
    const auto serial = find_abstract_batch_serial(cat, states);
    const double t_serial = seconds_since(t0);
    t0 = Clock::now();
    const auto parallel = find_abstract_batch(cat, states);
    const double t_parallel = seconds_since(t0);
    std::printf("lookup  %zu states, %zu leaves: serial scan %.3fs, parallel descent %.3fs, speedup %.1fx, %s\n",
                n_states, cat.leaf_count(), t_serial, t_parallel, t_serial / t_parallel,
                serial == parallel ? "identical" : "MISMATCH");

    ExperimentConfig cfg;
    cfg.env.name = "wumpus";
    cfg.env.size = 8;
    cfg.agent.n_episodes = 300;
    cfg.agent.horizon = 160;
    cfg.output_dir = "unused";
    for (int s = 1; s <= n_seeds; ++s) cfg.seeds.push_back(static_cast<std::uint64_t>(s));

    cfg.workers = 1;
    t0 = Clock::now();
    const auto runs_serial = run_all(cfg);
    const double r_serial = seconds_since(t0);
    cfg.workers = 0;
    t0 = Clock::now();
    const auto runs_parallel = run_all(cfg);
    const double r_parallel = seconds_since(t0);
    bool same = runs_serial.size() == runs_parallel.size();
    for (std::size_t i = 0; same && i < runs_serial.size(); ++i) {
        same = metrics_csv(runs_serial[i].stats) == metrics_csv(runs_parallel[i].stats);
    }
    std::printf("seeds   %d runs of %d episodes: serial %.3fs, parallel %.3fs, speedup %.1fx, %s\n", n_seeds,
                cfg.agent.n_episodes, r_serial, r_parallel, r_serial / r_parallel, same ? "identical" : "MISMATCH");
    return serial == parallel && same ? 0 : 1;
}
