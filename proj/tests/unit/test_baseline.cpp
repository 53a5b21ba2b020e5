#include <doctest.h>

#include <set>

#include "darrl/baseline.hpp"
#include "darrl/envs.hpp"
#include "../support/oracles.hpp"

using namespace darrl;

TEST_CASE("concrete table indexing is a bijection") {
    const std::vector<VariableSpec> vars{{"a", VarKind::integer, 1, 3}, {"b", VarKind::integer, 0, 4}, {"c", VarKind::integer, -1, 0}};
    const ConcreteQTable q(vars, 2);
    CHECK(q.num_states() == 30);
    std::set<std::size_t> seen;
    for (double a = 1; a <= 3; ++a)
        for (double b = 0; b <= 4; ++b)
            for (double c = -1; c <= 0; ++c) seen.insert(q.index_of({a, b, c}));
    CHECK(seen.size() == 30);
    CHECK(*seen.rbegin() == 29);
    CHECK_THROWS_AS(q.index_of({4, 0, 0}), std::out_of_range);
    CHECK_THROWS_AS(q.index_of({1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(ConcreteQTable({{"r", VarKind::real, 0, 1}}, 2), UnsupportedEnvironmentError);
}

TEST_CASE("continuous environments are rejected") {
    WaterWorld env = waterworld_make();
    Rng rng(1);
    CHECK_THROWS_AS(concrete_q_learn(env, AgentConfig{}, rng), UnsupportedEnvironmentError);
}

TEST_CASE("two-state chain converges to the hand-computed values") {
    oracle::TableEnv env = oracle::two_state_chain();
    AgentConfig c;
    c.gamma = 0.9;
    c.alpha = 0.5;
    c.n_episodes = 2000;
    c.horizon = 20;
    Rng rng(3);
    const auto res = concrete_q_learn(env, c, rng);
    CHECK(res.q.get({1}, 1) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(res.q.get({0}, 1) == doctest::Approx(0.9).epsilon(1e-6));
    CHECK(res.q.get({0}, 0) == doctest::Approx(0.81).epsilon(1e-6));
    CHECK(res.q.get({1}, 0) == doctest::Approx(0.81).epsilon(1e-6));

    const auto vi = oracle::value_iteration(env, 2, 0.9);
    CHECK(vi.q.at({0})[1] == doctest::Approx(0.9));
    CHECK(vi.q.at({1})[0] == doctest::Approx(0.81));
}

TEST_CASE("greedy baseline policy is optimal on small fixtures") {
    AgentConfig c;
    c.alpha = 0.5;
    c.n_episodes = 3000;
    Rng rng(8);
    auto check = [&](auto env, std::size_t actions) {
        c.horizon = env.descriptor().horizon_hint;
        const auto res = concrete_q_learn(env, c, rng);
        const auto vi = oracle::value_iteration(env, actions, c.gamma);
        for (const State& s : env.nonterminal_states()) {
            CHECK(vi.optimal_actions(s).count(res.q.argmax(s)) == 1);
        }
    };
    check(oracle::corridor(8), 4);
    check(example_grid(true), 4);
}

TEST_CASE("baseline is deterministic per seed") {
    GridWorld env = wumpus_make(6, 1, 0.1);
    AgentConfig c;
    c.n_episodes = 200;
    c.horizon = 120;
    Rng a(5), b(5);
    const auto ra = concrete_q_learn(env, c, a);
    const auto rb = concrete_q_learn(env, c, b);
    for (std::size_t i = 0; i < ra.stats.size(); ++i) {
        CHECK(ra.stats.episodes[i].ret == rb.stats.episodes[i].ret);
        CHECK(ra.stats.episodes[i].steps == rb.stats.episodes[i].steps);
    }
    CHECK(ra.stats.episodes.front().leaf_count == 36);
}
