#include <catch2/catch_amalgamated.hpp>

#include "removal_lab/count.hpp"
#include "removal_lab/shattering.hpp"
#include "support/oracles.hpp"

using namespace removal_lab;

namespace {

WitnessSearchConfig exhaustive_cfg() {
    WitnessSearchConfig c;
    c.mode = SearchMode::exhaustive;
    return c;
}

ShatterConstants override_constants(const Rat& d2, const Rat& d3,
                                    WitnessSearchConfig w = exhaustive_cfg()) {
    return ShatterConstants::override_mode({{2, d2}, {3, d3}}, w);
}

// V1, V2, V3 as consecutive ranges of the given size.
std::vector<std::vector<int>> consecutive_blocks(int count, int size) {
    std::vector<std::vector<int>> blocks(static_cast<std::size_t>(count));
    int at = 0;
    for (int i = 0; i < count; ++i)
        for (int j = 0; j < size; ++j) blocks[static_cast<std::size_t>(i)].push_back(at++);
    return blocks;
}

}  // namespace

TEST_CASE("build_pattern_hypergraph fixtures") {
    Graph g = oracle::two_complete_blocks();

    // H' = single edge: the hypergraph edges are exactly the graph edges.
    Pattern edge = Pattern::preset("edge");
    auto gamma = build_pattern_hypergraph(g, edge, {{0, 1, 2, 3}, {4, 5, 6, 7}});
    CHECK(gamma.edge_count() == 8);

    // H' = edgeless on 2 vertices: complete bipartite hypergraph.
    Pattern none = Pattern::from_edges(2, {}, /*require_edge=*/false);
    auto complete = build_pattern_hypergraph(g, none, {{0, 1, 2, 3}, {4, 5, 6, 7}});
    CHECK(complete.edge_count() == 16);

    // H' = triangle against the sides of K_{3,3,3}: 27 edges, matching the
    // partite copy count.
    auto [k333, sides] = oracle::complete_tripartite(3, 3, 3);
    Pattern tri = Pattern::preset("triangle");
    auto gamma3 = build_pattern_hypergraph(k333, tri, sides);
    CHECK(gamma3.edge_count() == count_partite_copies(k333, tri, sides));
    CHECK(gamma3.edge_count() == 27);
}

TEST_CASE("verify_shattering fixtures") {
    // Pair with no edges between: trivial partitions achieve (1, 1).
    Graph none = parse_edge_list("6 0");
    SetPartition ta{{{0, 1, 2}}}, tb{{{3, 4, 5}}};
    auto [c1, t1] = verify_shattering(none, {0, 1, 2}, {3, 4, 5}, ta, tb, Rat(1, 10));
    CHECK(c1 == Rat(1));
    CHECK(t1 == 1);

    // Complete bipartite pair: every block density is 1, so c = 0.
    Graph complete = parse_edge_list(
        "8 16\n0 4\n0 5\n0 6\n0 7\n1 4\n1 5\n1 6\n1 7\n2 4\n2 5\n2 6\n2 7\n3 4\n3 5\n3 6\n3 7");
    SetPartition pa{{{0, 1}, {2, 3}}}, pb{{{4, 5}, {6, 7}}};
    auto [c2, t2] = verify_shattering(complete, {0, 1, 2, 3}, {4, 5, 6, 7}, pa, pb, Rat(1));
    CHECK(c2 == Rat(0));
    CHECK(t2 == 2);

    // Two-complete-blocks: the block partitions put half the mass in
    // density-0 pairs at alpha = 1/2.
    Graph blocks = oracle::two_complete_blocks();
    auto [c3, t3] = verify_shattering(blocks, {0, 1, 2, 3}, {4, 5, 6, 7}, pa, pb, Rat(1, 2));
    CHECK(c3 == Rat(1, 2));
    CHECK(t3 == 2);

    SetPartition broken{{{0, 1}, {1, 2, 3}}};
    CHECK_THROWS_AS(verify_shattering(blocks, {0, 1, 2, 3}, {4, 5, 6, 7}, broken, pb, Rat(1, 2)),
                    PreconditionError);
}

TEST_CASE("shattering predicate monotonicity") {
    // A verified (alpha,c,t)-shattering also verifies for alpha' >= alpha,
    // c' <= c, t' >= t: c_achieved grows with alpha.
    for (int trial = 0; trial < 30; ++trial) {
        Rng rng(derive_seed(2100, trial));
        Graph g = oracle::random_graph(10, 0.4, derive_seed(2101, trial));
        std::vector<int> a{0, 1, 2, 3, 4}, b{5, 6, 7, 8, 9};
        SetPartition pa{{{0, 1}, {2, 3, 4}}}, pb{{{5}, {6, 7}, {8, 9}}};
        Rat alpha(1 + rng.below_int(3), 10);
        auto [c, t] = verify_shattering(g, a, b, pa, pb, alpha);
        auto [c_bigger, t_same] = verify_shattering(g, a, b, pa, pb, alpha + Rat(1, 10));
        CHECK(c_bigger >= c);
        CHECK(t_same == t);
    }
}

TEST_CASE("degree_signature_partition fixtures") {
    std::vector<int> v_last{8, 9, 10, 11};
    std::vector<SignatureBlock> blocks{{0, 1, {0, 1, 2, 3}}, {1, 1, {4, 5, 6, 7}}};

    // Edgeless graph: every vertex is low everywhere, single class S = I x [z].
    Graph none = parse_edge_list("12 0");
    auto sig1 = degree_signature_partition(none, v_last, blocks, Rat(1, 2));
    CHECK(sig1.partition.part_count() == 1);
    CHECK(sig1.signatures[0].size() == 2);

    // Complete graph: nobody is low anywhere, single class S = empty.
    Graph complete = oracle::complete_graph(12);
    auto sig2 = degree_signature_partition(complete, v_last, blocks, Rat(1, 2));
    CHECK(sig2.partition.part_count() == 1);
    CHECK(sig2.signatures[0].empty());

    // One block, half of V_h joined to all of it, half isolated, alpha = 1/2.
    std::vector<std::pair<int, int>> edges;
    for (int v : {8, 9})
        for (int u : {0, 1, 2, 3}) edges.emplace_back(u, v);
    Graph half = Graph::from_edges(12, edges);
    auto sig3 = degree_signature_partition(half, v_last, {{0, 1, {0, 1, 2, 3}}}, Rat(1, 2));
    CHECK(sig3.partition.part_count() == 2);
}

TEST_CASE("shatter_pair base case h = 2") {
    // Sparse pair: d = 1/9 < alpha = 1/5, trivial partitions, c = 1, t = 1.
    Graph sparse = parse_edge_list("6 1\n0 3");
    Pattern edge = Pattern::preset("edge");
    auto constants = ShatterConstants::override_mode({{2, Rat(1, 4)}}, exhaustive_cfg());
    auto outcome = shatter_pair(sparse, edge, {{0, 1, 2}, {3, 4, 5}}, Rat(1, 5), constants, 1);
    REQUIRE(outcome.shattered());
    CHECK(outcome.shattering->c_achieved == Rat(1));
    CHECK(outcome.shattering->t == 1);
    auto [c, t] = verify_shattering(sparse, outcome.shattering->set_a, outcome.shattering->set_b,
                                    outcome.shattering->part_a, outcome.shattering->part_b,
                                    Rat(1, 5));
    CHECK(c == outcome.shattering->c_achieved);
    CHECK(t == outcome.shattering->t);

    // Dense pair at the base: copies exceed the threshold, certificate.
    Graph dense = oracle::two_complete_blocks();
    auto constants_tight = ShatterConstants::override_mode({{2, Rat(1, 10)}}, exhaustive_cfg());
    auto fail = shatter_pair(dense, edge, {{0, 1, 2, 3}, {4, 5, 6, 7}}, Rat(1, 5),
                             constants_tight, 1);
    REQUIRE_FALSE(fail.shattered());
    REQUIRE(fail.failure.has_value());
    // strictly more copies than the threshold, each one genuine and distinct
    CHECK(Rat(static_cast<long long>(fail.failure->copies.size()), 1) > fail.failure->threshold);
    std::set<std::vector<int>> distinct(fail.failure->copies.begin(), fail.failure->copies.end());
    CHECK(distinct.size() == fail.failure->copies.size());
    for (const auto& image : fail.failure->copies) CHECK(is_labeled_copy(dense, edge, image));
}

TEST_CASE("shatter_pair h = 3 with an isolated third block") {
    // G = complete bipartite between V1 and V2, V3 isolated: no triangles,
    // case 2 applies and the (V_i, V_3) pair shatters completely.
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < 4; ++u)
        for (int v = 4; v < 8; ++v) edges.emplace_back(u, v);
    Graph g = Graph::from_edges(12, edges);
    Pattern tri = Pattern::preset("triangle");
    auto blocks = consecutive_blocks(3, 4);
    auto outcome = shatter_pair(g, tri, blocks, Rat(1, 5),
                                override_constants(Rat(1, 20), Rat(1, 20)), 3);
    REQUIRE(outcome.shattered());
    CHECK(outcome.shattering->pattern_edge.second == 2);  // pair (V_i, V_3)
    CHECK(outcome.shattering->c_achieved >= Rat(1, 9));
    CHECK(outcome.shattering->c_achieved == Rat(1));
    auto [c, t] = verify_shattering(g, outcome.shattering->set_a, outcome.shattering->set_b,
                                    outcome.shattering->part_a, outcome.shattering->part_b,
                                    Rat(1, 5));
    CHECK(c == outcome.shattering->c_achieved);
    CHECK(t == outcome.shattering->t);
}

TEST_CASE("shatter_pair returns a failure certificate when copies exceed the threshold") {
    auto [k333, sides] = oracle::complete_tripartite(3, 3, 3);
    Pattern tri = Pattern::preset("triangle");
    // threshold = d3 * 27 = 13.5 < 27 copies
    auto outcome =
        shatter_pair(k333, tri, sides, Rat(1, 5), override_constants(Rat(1, 4), Rat(1, 2)), 9);
    REQUIRE_FALSE(outcome.shattered());
    REQUIRE(outcome.failure.has_value());
    CHECK(outcome.failure->copies.size() == 14);  // floor(13.5) + 1
    std::set<std::vector<int>> distinct(outcome.failure->copies.begin(),
                                        outcome.failure->copies.end());
    CHECK(distinct.size() == outcome.failure->copies.size());
    for (const auto& image : outcome.failure->copies) {
        CHECK(is_labeled_copy(k333, tri, image));
        for (int i = 0; i < 3; ++i) {
            bool inside = false;
            for (int v : sides[static_cast<std::size_t>(i)])
                if (v == image[static_cast<std::size_t>(i)]) inside = true;
            CHECK(inside);
        }
    }
}

TEST_CASE("theoretical constants force the failure branch on any copy") {
    auto [k333, sides] = oracle::complete_tripartite(3, 3, 3);
    Pattern tri = Pattern::preset("triangle");
    auto outcome = shatter_pair(k333, tri, sides, Rat(1, 5),
                                ShatterConstants::theoretical_mode(exhaustive_cfg()), 2);
    REQUIRE_FALSE(outcome.shattered());
    CHECK(outcome.failure->copies.size() == 1);
}

TEST_CASE("case-2 counting bound on certified superregular blocks") {
    // If at least |V_3|/3 vertices have >= alpha*|V_i| neighbors in both
    // blocks of a certified (alpha,beta)-superregular pair, the partite copy
    // count is at least (|V_3|/3) * beta * alpha^2 * |V_1||V_2|.
    Pattern tri = Pattern::preset("triangle");
    Pattern edge = Pattern::preset("edge");
    int checked = 0;
    for (int trial = 0; trial < 40; ++trial) {
        Graph g = oracle::random_graph(12, 0.82, derive_seed(2500, trial));
        auto blocks = consecutive_blocks(3, 4);
        auto gamma = build_pattern_hypergraph(g, edge, {blocks[0], blocks[1]});
        Rat alpha(1, 2), beta(1, 8);
        auto rep = superregular_witness(gamma, {blocks[0], blocks[1]}, alpha, beta,
                                        exhaustive_cfg());
        if (!rep.superregular) continue;
        VertexMask m1 = VertexMask::of(12, blocks[0]);
        VertexMask m2 = VertexMask::of(12, blocks[1]);
        long long good = 0;
        for (int v : blocks[2]) {
            bool ok1 = BigInt(g.degree_into(v, m1)) * rat_den(alpha) >=
                       rat_num(alpha) * BigInt(blocks[0].size());
            bool ok2 = BigInt(g.degree_into(v, m2)) * rat_den(alpha) >=
                       rat_num(alpha) * BigInt(blocks[1].size());
            if (ok1 && ok2) ++good;
        }
        if (3 * good < static_cast<long long>(blocks[2].size())) continue;
        Rat bound = Rat(static_cast<long long>(blocks[2].size()), 3) * beta * alpha * alpha *
                    Rat(16);  // |V_1||V_2| = 16
        long long copies = count_partite_copies(g, tri, blocks);
        CHECK(Rat(copies) >= bound);
        ++checked;
    }
    CHECK(checked >= 3);
}

TEST_CASE("shatter outcomes are sound on random tripartite instances") {
    Pattern tri = Pattern::preset("triangle");
    WitnessSearchConfig wc;
    wc.mode = SearchMode::randomized;
    wc.samples = 300;
    int shattered = 0, failed = 0;
    for (int trial = 0; trial < 40; ++trial) {
        Rng rng(derive_seed(2700, trial));
        int block = 4 + rng.below_int(6);
        double p = 0.15 + 0.75 * static_cast<double>(trial % 5) / 4.0;
        Graph g = oracle::random_graph(3 * block, p, derive_seed(2701, trial));
        auto blocks = consecutive_blocks(3, block);
        Rat d2(1, 5 + rng.below_int(15)), d3(1, 3 + rng.below_int(10));
        auto constants = override_constants(d2, d3, wc.with_seed(derive_seed(2702, trial)));
        ShatterOutcome outcome;
        try {
            outcome = shatter_pair(g, tri, blocks, Rat(1, 5 + rng.below_int(10)), constants,
                                   derive_seed(2703, trial));
        } catch (const BudgetError&) {
            continue;  // scale-infeasible is a legitimate (distinct) outcome
        }
        if (outcome.shattered()) {
            ++shattered;
            const Shattering& s = *outcome.shattering;
            auto [c, t] = verify_shattering(g, s.set_a, s.set_b, s.part_a, s.part_b, s.alpha);
            CHECK(c == s.c_achieved);
            CHECK(t == s.t);
        } else {
            ++failed;
            REQUIRE(outcome.failure.has_value());
            CHECK(Rat(static_cast<long long>(outcome.failure->copies.size())) >
                  outcome.failure->threshold);
            std::set<std::vector<int>> distinct(outcome.failure->copies.begin(),
                                                outcome.failure->copies.end());
            CHECK(distinct.size() == outcome.failure->copies.size());
            for (const auto& image : outcome.failure->copies)
                CHECK(is_labeled_copy(g, tri, image));
        }
    }
    CHECK(shattered > 0);
    CHECK(failed > 0);
}
