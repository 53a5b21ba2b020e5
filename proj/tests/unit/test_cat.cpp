#include <doctest.h>

#include <algorithm>
#include <stdexcept>

#include "darrl/cat.hpp"
#include "darrl/rng.hpp"
#include "../support/oracles.hpp"

using namespace darrl;

namespace {

std::vector<VariableSpec> grid4() { return {{"x", VarKind::integer, 1, 4}, {"y", VarKind::integer, 1, 4}}; }

Abstraction box(double x0, double x1, double y0, double y1) {
    return {Interval::integer(x0, x1), Interval::integer(y0, y1)};
}

}  // namespace

TEST_CASE("make_cat root spans the global ranges") {
    const Cat cat = make_cat(grid4());
    CHECK(cat.size() == 1);
    CHECK(cat.leaf_count() == 1);
    CHECK(cat.node(cat.root()).abstraction == box(1, 4, 1, 4));

    const Cat unit = make_cat({{"v", VarKind::integer, 5, 5}});
    CHECK(unit.node(0).abstraction[0].width() == 1.0);
    CHECK_FALSE(splittable(unit.node(0).abstraction, 0, 2));

    const Cat real = make_cat({{"x", VarKind::real, 0, 300}, {"y", VarKind::real, 0, 300}});
    const auto& theta = real.node(0).abstraction;
    CHECK(theta[0].closed_hi);
    CHECK(theta[0].contains(300.0));
    CHECK(theta[0].contains(0.0));
}

TEST_CASE("variable specs reject bad bounds") {
    CHECK_THROWS_AS(make_cat({{"x", VarKind::integer, 4, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(make_cat({{"x", VarKind::integer, 1, 2.5}}), std::invalid_argument);
}

TEST_CASE("f_split on integers") {
    SUBCASE("4x4 root on x") {
        const auto parts = f_split(box(1, 4, 1, 4), 0, 2);
        REQUIRE(parts.size() == 2);
        CHECK(parts[0] == box(1, 2, 1, 4));
        CHECK(parts[1] == box(3, 4, 1, 4));
    }
    SUBCASE("[1,5] halves to [1,3] and [4,5]") {
        const auto parts = f_split({Interval::integer(1, 5)}, 0, 2);
        REQUIRE(parts.size() == 2);
        CHECK(parts[0][0] == Interval::integer(1, 3));
        CHECK(parts[1][0] == Interval::integer(4, 5));
    }
    SUBCASE("f=4 on a width-4 interval gives unit cells") {
        const auto parts = f_split(box(1, 4, 1, 4), 1, 4);
        REQUIRE(parts.size() == 4);
        for (int k = 0; k < 4; ++k) CHECK(parts[k] == box(1, 4, k + 1, k + 1));
    }
    SUBCASE("parts reconstruct the interval") {
        for (int hi = 2; hi <= 40; ++hi) {
            for (int f = 2; f <= hi; ++f) {
                const auto parts = f_split({Interval::integer(1, hi)}, 0, f);
                REQUIRE(parts.size() == static_cast<std::size_t>(f));
                double next = 1;
                double widest = 0, narrowest = 1e9;
                for (const auto& p : parts) {
                    CHECK(p[0].lo == next);
                    next = p[0].hi + 1;
                    widest = std::max(widest, p[0].width());
                    narrowest = std::min(narrowest, p[0].width());
                }
                CHECK(next == hi + 1);
                CHECK(widest - narrowest <= 1.0);
            }
        }
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(f_split(box(1, 1, 1, 4), 0, 2), std::invalid_argument);
        CHECK_THROWS_AS(f_split(box(1, 4, 1, 4), 0, 1), std::invalid_argument);
        CHECK_THROWS_AS(f_split(box(1, 4, 1, 4), 2, 2), std::out_of_range);
        CHECK_THROWS_AS(f_split(box(1, 4, 1, 4), 0, 5), std::invalid_argument);
    }
}

TEST_CASE("f_split on reals") {
    const Abstraction theta{Interval::real(0, 300, true)};
    const auto parts = f_split(theta, 0, 3);
    REQUIRE(parts.size() == 3);
    CHECK(parts[0][0].lo == 0.0);
    CHECK(parts[0][0].hi == doctest::Approx(100.0));
    CHECK_FALSE(parts[0][0].closed_hi);
    CHECK_FALSE(parts[1][0].closed_hi);
    CHECK(parts[2][0].closed_hi);
    CHECK(parts[2][0].hi == 300.0);
    CHECK_FALSE(parts[0][0].contains(100.0));
    CHECK(parts[1][0].contains(100.0));

    const SplitLimits coarse{60.0};
    CHECK(splittable(theta, 0, 5, coarse));
    CHECK_FALSE(splittable(theta, 0, 6, coarse));
    CHECK_THROWS_AS(f_split(theta, 0, 6, coarse), std::invalid_argument);
}

TEST_CASE("find_abstract on the six-leaf tree") {
    const Cat cat = oracle::fig3_tree();
    CHECK(cat.size() == 11);
    CHECK(cat.leaf_count() == 6);
    const NodeId leaf = cat.find_abstract({3, 1});
    CHECK(cat.node(leaf).abstraction == box(3, 4, 1, 2));
    for (const auto& s : oracle::enumerate_grid(cat)) CHECK(cat.find_abstract(s) == find_abstract_linear(cat, s));

    CHECK(make_cat(grid4()).find_abstract({2, 3}) == 0);
    CHECK_THROWS_AS(cat.find_abstract({5, 1}), std::out_of_range);
    CHECK_THROWS_AS(cat.find_abstract({1, 1, 1}), std::invalid_argument);
}

TEST_CASE("refine_leaf bookkeeping") {
    Cat cat = make_cat(grid4());
    const auto kids = cat.refine_leaf(0, 0, 2);
    CHECK(kids == std::vector<NodeId>{1, 2});
    CHECK(cat.leaf_count() == 2);
    CHECK(cat.node(0).split_var == std::optional<std::size_t>{0});
    CHECK(cat.node(0).split_factor == std::optional<int>{2});
    CHECK(cat.node(1).parent == std::optional<NodeId>{0});
    CHECK_THROWS_AS(cat.refine_leaf(0, 1, 2), std::invalid_argument);
    CHECK_THROWS_AS(cat.refine_leaf(99, 1, 2), std::out_of_range);

    const auto more = cat.refine_leaf(2, 1, 4);
    CHECK(cat.leaf_count() == 5);
    CHECK(more == std::vector<NodeId>{3, 4, 5, 6});
}

TEST_CASE("is_refinement and is_direct_refinement") {
    CHECK(is_refinement(box(1, 2, 1, 4), box(1, 4, 1, 4)));
    CHECK(is_refinement(box(1, 4, 1, 4), box(1, 4, 1, 4)));
    CHECK_FALSE(is_refinement(box(1, 2, 1, 4), box(3, 4, 1, 4)));
    CHECK_THROWS_AS(is_refinement(box(1, 2, 1, 4), {Interval::integer(1, 4)}), std::invalid_argument);

    CHECK(is_direct_refinement(box(1, 2, 1, 4), box(1, 4, 1, 4), 2));
    CHECK_FALSE(is_direct_refinement(box(1, 2, 1, 2), box(1, 4, 1, 4), 2));
    CHECK_FALSE(is_direct_refinement(box(1, 3, 1, 4), box(1, 4, 1, 4), 2));
    CHECK_FALSE(is_direct_refinement(box(1, 4, 1, 4), box(1, 4, 1, 4), 2));
    // odd widths: 5 -> 3 and 2
    CHECK(is_direct_refinement({Interval::integer(1, 3)}, {Interval::integer(1, 5)}, 2));
    CHECK(is_direct_refinement({Interval::integer(4, 5)}, {Interval::integer(1, 5)}, 2));

    const Abstraction whole{Interval::real(0, 10, true)};
    CHECK(is_direct_refinement({Interval::real(0, 5)}, whole, 2));
    CHECK_FALSE(is_direct_refinement({Interval::real(0, 4)}, whole, 2));
}

TEST_CASE("compare_fineness") {
    const Cat pre = make_cat(grid4());
    Cat post = pre;
    post.refine_leaf(0, 1, 2);
    CHECK(compare_fineness(post, pre) == Fineness::strictly_finer);
    CHECK(compare_fineness(pre, post) == Fineness::not_finer);
    CHECK(compare_fineness(post, post) == Fineness::finer);

    Cat other = pre;
    other.refine_leaf(0, 0, 2);
    CHECK(compare_fineness(post, other) == Fineness::not_finer);
    CHECK(compare_fineness(other, post) == Fineness::not_finer);

    // leaf-wise oracle: a finer than b iff each leaf of a sits inside some leaf of b
    auto oracle_finer = [](const Cat& a, const Cat& b) {
        for (NodeId la : a.leaves()) {
            bool found = false;
            for (NodeId lb : b.leaves()) found = found || is_refinement(a.node(la).abstraction, b.node(lb).abstraction);
            if (!found) return false;
        }
        return true;
    };
    CHECK_FALSE(oracle_finer(post, other));
    CHECK(oracle_finer(oracle::fig3_tree(), post));
    CHECK(compare_fineness(oracle::fig3_tree(), post) == Fineness::strictly_finer);

    const Cat wrong = make_cat({{"x", VarKind::integer, 1, 5}, {"y", VarKind::integer, 1, 4}});
    CHECK_THROWS_AS(compare_fineness(wrong, pre), std::invalid_argument);
}

TEST_CASE("random refinements keep the partition and edge invariants") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        Cat cat = make_cat({{"a", VarKind::integer, 0, 19}, {"b", VarKind::integer, 1, 12}, {"c", VarKind::integer, 0, 3}});
        for (int r = 0; r < 50; ++r) {
            const std::vector<NodeId> leaves = cat.leaves();
            const NodeId leaf = leaves[uniform_index(rng, leaves.size())];
            const std::size_t var = uniform_index(rng, 3);
            const int f = 2 + static_cast<int>(uniform_index(rng, 2));
            if (!splittable(cat.node(leaf).abstraction, var, f)) continue;
            const Cat before = cat;
            const auto kids = cat.refine_leaf(leaf, var, f);
            CHECK(cat.leaf_count() == before.leaf_count() + static_cast<std::size_t>(f) - 1);
            CHECK(kids.size() == static_cast<std::size_t>(f));
            CHECK(compare_fineness(cat, before) == Fineness::strictly_finer);
        }
        const auto counts = oracle::leaf_cover_counts(cat, oracle::enumerate_grid(cat));
        CHECK(std::all_of(counts.begin(), counts.end(), [](int c) { return c == 1; }));
        for (const auto& n : cat.nodes()) {
            for (NodeId c : n.children) CHECK(is_direct_refinement(cat.node(c).abstraction, n.abstraction, *n.split_factor));
        }
    }
}

TEST_CASE("from_nodes rejects broken trees") {
    const Cat good = oracle::fig3_tree();
    CHECK(Cat::from_nodes(good.specs(), good.limits(), good.nodes()) == good);

    auto nodes = good.nodes();
    nodes[1].abstraction[1] = Interval::integer(1, 3);  // overlaps its sibling
    CHECK_THROWS_AS(Cat::from_nodes(good.specs(), good.limits(), nodes), std::invalid_argument);

    nodes = good.nodes();
    nodes[3].parent = 7;
    CHECK_THROWS_AS(Cat::from_nodes(good.specs(), good.limits(), nodes), std::invalid_argument);

    nodes = good.nodes();
    nodes.pop_back();
    CHECK_THROWS_AS(Cat::from_nodes(good.specs(), good.limits(), nodes), std::invalid_argument);
}
