#include <doctest.h>

#include <cmath>
#include <map>
#include <queue>
#include <set>

#include "darrl/envs.hpp"
#include "../support/oracles.hpp"

using namespace darrl;

TEST_CASE("slip outcomes") {
    const auto out = slip_outcomes(east, 0.1);
    CHECK(out[0].first == east);
    CHECK(out[0].second == doctest::Approx(0.8));
    std::set<ActionId> sides{out[1].first, out[2].first};
    CHECK(sides == std::set<ActionId>{north, south});
    CHECK(out[1].second == doctest::Approx(0.1));

    Rng rng(5);
    std::map<ActionId, int> counts;
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[sample_move(north, 0.1, rng)];
    CHECK(counts[north] / double(n) == doctest::Approx(0.8).epsilon(0.02));
    CHECK(counts[east] / double(n) == doctest::Approx(0.1).epsilon(0.05));
    CHECK(counts[west] / double(n) == doctest::Approx(0.1).epsilon(0.05));
    CHECK(counts[south] == 0);
}

TEST_CASE("example grid dynamics") {
    GridWorld env = example_grid(false);
    Rng rng(1);
    CHECK(env.reset(rng) == State{1, 1});
    CHECK(env.descriptor().variables.size() == 2);

    auto r = env.step(west, rng);
    CHECK(r.next_state == State{1, 1});
    CHECK(r.reward == -1.0);
    CHECK_FALSE(r.done);

    r = env.step(east, rng);
    CHECK(r.next_state == State{2, 1});
    r = env.step(south, rng);
    CHECK(r.reward == -10.0);
    CHECK(r.done);
    CHECK_FALSE(r.success);

    env.place({4, 3});
    r = env.step(south, rng);
    CHECK(r.reward == 10.0);
    CHECK(r.done);
    CHECK(r.success);

    CHECK(env.nonterminal_states().size() == 14);
    CHECK_THROWS_AS(env.step(4, rng), std::invalid_argument);
}

TEST_CASE("example grid random starts cover every free cell") {
    GridWorld env = example_grid(true);
    Rng rng(2);
    std::set<State> seen;
    for (int i = 0; i < 2000; ++i) seen.insert(env.reset(rng));
    CHECK(seen.size() == 14);
    CHECK(seen.count(State{2, 2}) == 0);
    CHECK(seen.count(State{4, 4}) == 0);
}

TEST_CASE("tabular model agrees with sampled steps") {
    GridWorld env = wumpus_make(6, 3, 0.1);
    Rng rng(9);
    for (const State& s : env.nonterminal_states()) {
        for (ActionId a = 0; a < 4; ++a) {
            const auto model = env.transitions(s, a);
            double total = 0.0;
            for (const auto& t : model) total += t.probability;
            CHECK(total == doctest::Approx(1.0));
            std::map<State, int> counts;
            const int n = 400;
            for (int i = 0; i < n; ++i) {
                env.place({static_cast<int>(s[0]), static_cast<int>(s[1])});
                const auto r = env.step(a, rng);
                bool known = false;
                for (const auto& t : model) {
                    known = known || (t.result.next_state == r.next_state && t.result.reward == r.reward &&
                                      t.result.done == r.done);
                }
                CHECK(known);
            }
        }
    }
}

TEST_CASE("wumpus layouts") {
    const GridWorld a = wumpus_make(16, 1, 0.1);
    const GridWorld b = wumpus_make(16, 1, 0.1);
    CHECK(a.layout().cells == b.layout().cells);
    CHECK(a.layout().start == std::optional<Cell2>{Cell2{1, 1}});
    CHECK(a.layout().at({16, 16}) == Terrain::goal);
    CHECK(a.descriptor().horizon_hint == 320);
    CHECK(wumpus_make(4, 1, 0.0).descriptor().horizon_hint == 100);

    int obstacles = 0, pits = 0;
    for (Terrain t : a.layout().cells) {
        obstacles += t == Terrain::obstacle;
        pits += t == Terrain::pit;
    }
    CHECK(obstacles == 20);
    CHECK(pits == 10);

    // independent BFS over free and goal cells
    std::set<std::pair<int, int>> seen{{1, 1}};
    std::queue<Cell2> frontier;
    frontier.push({1, 1});
    while (!frontier.empty()) {
        const Cell2 c = frontier.front();
        frontier.pop();
        for (ActionId m = 0; m < 4; ++m) {
            const Cell2 n = shifted(c, m);
            if (!a.layout().inside(n)) continue;
            const Terrain t = a.layout().at(n);
            if (t == Terrain::obstacle || t == Terrain::pit) continue;
            if (seen.insert({n.x, n.y}).second) frontier.push(n);
        }
    }
    CHECK(seen.count({16, 16}) == 1);

    CHECK(wumpus_make(16, 2, 0.1).layout().cells != a.layout().cells);
    CHECK_THROWS_AS(wumpus_make(3, 1, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(wumpus_make(8, 1, 0.6), std::invalid_argument);
}

TEST_CASE("office world") {
    OfficeWorld env = office_make(12, 0.0);
    Rng rng(1);
    CHECK(env.coffee() == Cell2{3, 3});
    CHECK(env.mail() == Cell2{9, 3});
    CHECK(env.office() == Cell2{9, 9});
    CHECK(env.start() == Cell2{3, 9});
    CHECK(env.reset(rng) == State{3, 9, 0, 0});

    CHECK(env.blocked({6, 1}, east));
    CHECK_FALSE(env.blocked({6, 3}, east));
    CHECK(env.blocked({1, 6}, south));
    CHECK_FALSE(env.blocked({3, 6}, south));
    CHECK_FALSE(env.blocked({9, 6}, south));
    CHECK(env.blocked({1, 1}, north));

    // deliver coffee and mail by hand
    env.place({3, 4, 0, 0});
    auto r = env.step(north, rng);
    CHECK(r.next_state == State{3, 3, 1, 0});
    CHECK(r.reward == 0.0);
    env.place({8, 3, 1, 0});
    r = env.step(east, rng);
    CHECK(r.next_state == State{9, 3, 1, 1});
    env.place({9, 8, 1, 1});
    r = env.step(south, rng);
    CHECK(r.done);
    CHECK(r.success);
    CHECK(r.reward == OfficeWorld::completion_reward);

    env.place({9, 8, 1, 0});
    r = env.step(south, rng);
    CHECK_FALSE(r.done);

    CHECK_THROWS_AS(office_make(7), std::invalid_argument);
    CHECK_THROWS_AS(office_make(2), std::invalid_argument);
}

TEST_CASE("taxi world") {
    TaxiWorld env = taxi_make(5, 0.0);
    Rng rng(4);
    CHECK(env.site(0) == Cell2{1, 1});
    CHECK(env.site(3) == Cell2{5, 5});
    CHECK_THROWS_AS(env.site(4), std::out_of_range);

    for (int i = 0; i < 500; ++i) {
        const State s = env.reset(rng);
        CHECK(s[2] != s[3]);
        CHECK(s[2] <= 3);
    }

    env.place({1, 1, 0, 3});
    auto r = env.step(TaxiWorld::dropoff, rng);
    CHECK(r.reward == TaxiWorld::illegal_reward);
    r = env.step(TaxiWorld::pickup, rng);
    CHECK(r.reward == TaxiWorld::move_reward);
    CHECK(r.next_state[2] == 4.0);
    r = env.step(TaxiWorld::pickup, rng);
    CHECK(r.reward == TaxiWorld::illegal_reward);
    r = env.step(west, rng);
    CHECK(r.next_state == State{1, 1, 4, 3});
    CHECK(r.reward == TaxiWorld::move_reward);

    env.place({5, 5, 4, 3});
    r = env.step(TaxiWorld::dropoff, rng);
    CHECK(r.done);
    CHECK(r.success);
    CHECK(r.reward == TaxiWorld::delivery_reward);
    CHECK(r.next_state[2] == 3.0);

    CHECK(env.descriptor().actions.size() == 6);
    CHECK_THROWS_AS(env.step(6, rng), std::invalid_argument);
    CHECK_THROWS_AS(taxi_make(4), std::invalid_argument);
}

TEST_CASE("water world") {
    WaterWorld env = waterworld_make();
    Rng rng(8);
    for (int i = 0; i < 200; ++i) {
        const State s = env.reset(rng);
        CHECK(std::hypot(s[2] - s[0], s[3] - s[1]) >= 40.0);
        CHECK(std::hypot(s[4] - s[0], s[5] - s[1]) >= 40.0);
        const auto v = env.green_velocity();
        CHECK(std::hypot(v[0], v[1]) == doctest::Approx(4.0));
    }

    env.place({150, 150, 10, 50, 250, 250}, {-4, 0}, {0, 0});
    auto r = env.step(east, rng);
    CHECK(r.next_state[0] == 156.0);
    CHECK(r.next_state[2] == 6.0);
    env.step(east, rng);
    env.step(east, rng);
    r = env.step(east, rng);
    CHECK(r.next_state[2] == 6.0);  // bounced off the west wall
    CHECK(env.green_velocity()[0] == 4.0);

    env.place({0, 0, 100, 100, 200, 200}, {0, 0}, {0, 0});
    r = env.step(west, rng);
    CHECK(r.next_state[0] == 0.0);

    env.place({100, 100, 125, 100, 300, 300}, {0, 0}, {0, 0});
    r = env.step(east, rng);
    CHECK(r.done);
    CHECK(r.success);
    CHECK(r.reward == WaterWorld::green_reward);

    // red wins when both touch
    env.place({100, 100, 115, 100, 85, 100}, {0, 0}, {0, 0});
    r = env.step(north, rng);
    CHECK(r.done);
    CHECK_FALSE(r.success);
    CHECK(r.reward == WaterWorld::red_reward);
}

TEST_CASE("clones are independent") {
    GridWorld env = example_grid(false);
    Rng rng(1);
    env.reset(rng);
    auto copy = env.clone();
    env.step(east, rng);
    CHECK(copy->state() == State{1, 1});
    CHECK(env.state() == State{2, 1});
}
