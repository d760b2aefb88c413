#include <catch2/catch_amalgamated.hpp>

#include "removal_lab/count.hpp"
#include "removal_lab/instances.hpp"
#include "support/oracles.hpp"

using namespace removal_lab;

TEST_CASE("gen_random edge probabilities") {
    CHECK(gen_random(12, Rat(0), 4).edge_count() == 0);
    CHECK(gen_random(12, Rat(1), 4).edge_count() == 66);

    // Binomial sanity band: n = 50, p = 1/2, mean 612.5, sigma 17.5.
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
        long long edges = gen_random(50, Rat(1, 2), seed).edge_count();
        CHECK(edges >= 543);
        CHECK(edges <= 683);
    }

    // Seed determinism.
    CHECK(gen_random(20, Rat(1, 3), 9).edges() == gen_random(20, Rat(1, 3), 9).edges());
    CHECK(gen_random(20, Rat(1, 3), 9).edges() != gen_random(20, Rat(1, 3), 10).edges());
}

TEST_CASE("gen_blowup fixtures") {
    Graph k22 = gen_blowup(Pattern::preset("edge"), {2, 2});
    CHECK(k22.edge_count() == 4);
    CHECK(k22.adjacent(0, 2));
    CHECK_FALSE(k22.adjacent(0, 1));

    Graph k3 = gen_blowup(Pattern::preset("triangle"), {1, 1, 1});
    CHECK(k3.edge_count() == 3);

    for (int trial = 0; trial < 10; ++trial) {
        Rng rng(derive_seed(3300, trial));
        Pattern f = Pattern::preset(trial % 2 == 0 ? "triangle" : "c4");
        std::vector<int> sizes;
        long long expected = 0;
        for (int i = 0; i < f.vertex_count(); ++i) sizes.push_back(1 + rng.below_int(4));
        for (auto [u, v] : f.edges())
            expected += static_cast<long long>(sizes[static_cast<std::size_t>(u)]) *
                        sizes[static_cast<std::size_t>(v)];
        CHECK(gen_blowup(f, sizes).edge_count() == expected);
    }

    CHECK_THROWS_AS(gen_blowup(Pattern::preset("edge"), {0, 2}), PreconditionError);
}

TEST_CASE("gen_behrend_set produces verified 3-AP-free sets") {
    auto one = gen_behrend_set(1, BehrendStrategy::sphere);
    CHECK(one.elements == std::vector<int>{1});

    // {1,2,4,5} is 3-AP-free in [1,5]; the exhaustive maximum has size 4.
    CHECK_FALSE(oracle::has_three_term_ap({1, 2, 4, 5}));
    auto ex5 = gen_behrend_set(5, BehrendStrategy::exhaustive);
    CHECK(ex5.elements.size() == 4);
    CHECK_FALSE(oracle::has_three_term_ap(ex5.elements));

    for (long long n : {3, 10, 17, 40, 100, 400}) {
        auto s = gen_behrend_set(n, BehrendStrategy::sphere);
        CHECK_FALSE(s.elements.empty());
        CHECK_FALSE(oracle::has_three_term_ap(s.elements));
        for (int v : s.elements) {
            CHECK(v >= 1);
            CHECK(v <= n);
        }
    }

    for (long long n : {6, 12, 20}) {
        auto ex = gen_behrend_set(n, BehrendStrategy::exhaustive);
        auto sphere = gen_behrend_set(n, BehrendStrategy::sphere);
        CHECK_FALSE(oracle::has_three_term_ap(ex.elements));
        CHECK(ex.elements.size() >= sphere.elements.size());  // maximum dominates
    }

    CHECK_THROWS_AS(gen_behrend_set(31, BehrendStrategy::exhaustive), BudgetError);
    CHECK_THROWS_AS(gen_behrend_set(0, BehrendStrategy::sphere), PreconditionError);
}

TEST_CASE("gen_ruzsa_szemeredi fixtures") {
    BehrendSet empty;
    empty.range = 3;
    CHECK(gen_ruzsa_szemeredi(3, empty).graph.edge_count() == 0);

    BehrendSet s1;
    s1.range = 2;
    s1.elements = {1};
    auto inst = gen_ruzsa_szemeredi(2, s1);
    CHECK(inst.graph.vertex_count() == 12);
    CHECK(inst.graph.edge_count() == 6);
    CHECK(oracle::triangles(inst.graph).size() == 2);
    CHECK(inst.planted_triangles == 2);

    BehrendSet bad;
    bad.range = 6;
    bad.elements = {1, 2, 3};  // 1,2,3 is a progression
    CHECK_THROWS_AS(gen_ruzsa_szemeredi(6, bad), PreconditionError);
}

TEST_CASE("rs instances: m * |S| triangles, every edge in exactly one") {
    for (int m : {2, 5, 8, 12}) {
        auto s = gen_behrend_set(m, BehrendStrategy::exhaustive);
        auto inst = gen_ruzsa_szemeredi(m, s);
        auto tris = oracle::triangles(inst.graph);
        CHECK(static_cast<long long>(tris.size()) ==
              static_cast<long long>(m) * static_cast<long long>(s.elements.size()));
        std::map<std::pair<int, int>, int> edge_hits;
        for (const auto& t : tris) {
            edge_hits[{t[0], t[1]}]++;
            edge_hits[{t[0], t[2]}]++;
            edge_hits[{t[1], t[2]}]++;
        }
        CHECK(edge_hits.size() == static_cast<std::size_t>(inst.graph.edge_count()));
        for (const auto& [e, hits] : edge_hits) CHECK(hits == 1);
    }
}

TEST_CASE("gen_planted fixtures") {
    Graph base = oracle::random_graph(12, 0.2, 55);
    Pattern tri = Pattern::preset("triangle");
    auto same = gen_planted(base, tri, 0, 1);
    CHECK(same.graph.edges() == base.edges());

    Graph empty = parse_edge_list("12 0");
    auto planted = gen_planted(empty, tri, 3, 42);
    CHECK(oracle::triangles(planted.graph).size() == 3);
    CHECK(planted.placements.size() == 3);
    std::set<int> used;
    for (const auto& image : planted.placements)
        for (int v : image) CHECK(used.insert(v).second);  // vertex-disjoint

    CHECK_THROWS_AS(gen_planted(empty, tri, 5, 1), PreconditionError);
}
