#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "removal_lab/hypergraph.hpp"
#include "removal_lab/regularity.hpp"
#include "support/oracles.hpp"

using namespace removal_lab;

namespace {

WitnessSearchConfig exhaustive_cfg() {
    WitnessSearchConfig c;
    c.mode = SearchMode::exhaustive;
    return c;
}

WitnessSearchConfig randomized_cfg(std::uint64_t seed, long long samples = 2000) {
    WitnessSearchConfig c;
    c.mode = SearchMode::randomized;
    c.samples = samples;
    c.seed = seed;
    return c;
}

struct PlantedGamma {
    KUniformHypergraph gamma;
    std::vector<std::vector<int>> blocks;
};

// Random k-partite hypergraph with an empty alpha-corner planted, so the
// tuple is certainly not (alpha, beta)-superregular while staying dense.
PlantedGamma planted_non_superregular(int k, int block_size, const Rat& alpha, Rng& rng,
                                      int keep_percent = 85) {
    std::vector<std::vector<int>> blocks(static_cast<std::size_t>(k));
    int at = 0;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < block_size; ++j) blocks[static_cast<std::size_t>(i)].push_back(at++);
    long long m = ceil_mul(alpha, block_size);
    auto in_corner = [&](const std::vector<int>& edge) {
        for (int i = 0; i < k; ++i) {
            long long pos = edge[static_cast<std::size_t>(i)] -
                            blocks[static_cast<std::size_t>(i)].front();
            if (pos >= m) return false;
        }
        return true;
    };
    std::vector<std::vector<int>> edges;
    std::vector<int> cur(static_cast<std::size_t>(k));
    std::vector<int> idx(static_cast<std::size_t>(k), 0);
    while (true) {
        for (int i = 0; i < k; ++i)
            cur[static_cast<std::size_t>(i)] =
                blocks[static_cast<std::size_t>(i)]
                      [static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
        if (!in_corner(cur) && rng.below(100) < static_cast<std::uint64_t>(keep_percent))
            edges.push_back(cur);
        int i = k - 1;
        while (i >= 0 && ++idx[static_cast<std::size_t>(i)] == block_size) {
            idx[static_cast<std::size_t>(i)] = 0;
            --i;
        }
        if (i < 0) break;
    }
    return {KUniformHypergraph::make(k, blocks, std::move(edges)), blocks};
}

}  // namespace

TEST_CASE("superregular_witness on fixtures") {
    auto complete = KUniformHypergraph::complete(3, {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}});
    auto rep =
        superregular_witness(complete, complete.blocks(), Rat(1, 3), Rat(9, 10), exhaustive_cfg());
    CHECK(rep.superregular);
    CHECK(rep.certified);

    auto edgeless = KUniformHypergraph::make(2, {{0, 1, 2}, {3, 4, 5}}, {});
    auto rep2 =
        superregular_witness(edgeless, edgeless.blocks(), Rat(1, 2), Rat(1, 10), exhaustive_cfg());
    CHECK_FALSE(rep2.superregular);
    CHECK(rep2.witness_density.pairs == 0);

    // Two complete 2x2 blocks as a 2-uniform hypergraph: alpha = 1/2,
    // beta = 1/4 gives a cross witness of density 0.
    Graph g = oracle::two_complete_blocks();
    auto gamma = bipartite_hypergraph(g, {0, 1, 2, 3}, {4, 5, 6, 7});
    auto rep3 =
        superregular_witness(gamma, gamma.blocks(), Rat(1, 2), Rat(1, 4), exhaustive_cfg());
    CHECK_FALSE(rep3.superregular);
    CHECK(rep3.witness_density.pairs == 0);
    CHECK(rep3.witness[0].size() == 2);
    CHECK(rep3.witness[1].size() == 2);

    CHECK_THROWS_AS(superregular_witness(gamma, gamma.blocks(), Rat(1, 2), Rat(5, 4),
                                         exhaustive_cfg()),
                    PreconditionError);
}

TEST_CASE("witness modes: randomized never fabricates, exhaustive certifies") {
    for (int trial = 0; trial < 25; ++trial) {
        Rng rng(derive_seed(1200, trial));
        int block = 5 + rng.below_int(4);
        Rat alpha(1, 2), beta(1, 5);
        auto inst = planted_non_superregular(2, block, alpha, rng);
        auto ex = superregular_witness(inst.gamma, inst.blocks, alpha, beta, exhaustive_cfg());
        auto rz = superregular_witness(inst.gamma, inst.blocks, alpha, beta,
                                       randomized_cfg(derive_seed(1201, trial)));
        if (!rz.superregular) {
            Density d = hyperdensity(inst.gamma, rz.witness);
            CHECK(d.value() < beta);
            CHECK_FALSE(ex.superregular);  // randomized may miss, never fabricate
        }
        if (ex.superregular) CHECK(rz.superregular);
    }
}

TEST_CASE("exhaustive witness search has hard budget errors") {
    std::vector<std::vector<int>> big(2);
    for (int i = 0; i < 16; ++i) big[0].push_back(i);
    for (int i = 16; i < 32; ++i) big[1].push_back(i);
    auto gamma = KUniformHypergraph::complete(2, big);
    CHECK_THROWS_AS(superregular_witness(gamma, big, Rat(1, 2), Rat(1, 4), exhaustive_cfg()),
                    BudgetError);
}

TEST_CASE("is_epsilon_regular fixtures") {
    Graph complete = parse_edge_list(
        "8 16\n0 4\n0 5\n0 6\n0 7\n1 4\n1 5\n1 6\n1 7\n2 4\n2 5\n2 6\n2 7\n3 4\n3 5\n3 6\n3 7");
    CHECK(is_epsilon_regular(complete, {0, 1, 2, 3}, {4, 5, 6, 7}, Rat(1, 10), exhaustive_cfg())
              .regular);

    Graph none = parse_edge_list("8 0");
    CHECK(is_epsilon_regular(none, {0, 1, 2, 3}, {4, 5, 6, 7}, Rat(1, 10), exhaustive_cfg())
              .regular);

    Graph blocks = oracle::two_complete_blocks();
    auto rep = is_epsilon_regular(blocks, {0, 1, 2, 3}, {4, 5, 6, 7}, Rat(1, 4), exhaustive_cfg());
    CHECK_FALSE(rep.regular);
    Rat dev = rep.witness_density.value() - rep.pair_density.value();
    if (dev < 0) dev = -dev;
    CHECK(dev >= Rat(1, 4));

    // Randomized mode never fabricates: its witnesses re-verify exactly.
    auto rnd =
        is_epsilon_regular(blocks, {0, 1, 2, 3}, {4, 5, 6, 7}, Rat(1, 4), randomized_cfg(7, 200));
    if (!rnd.regular) {
        Rat dev2 = rnd.witness_density.value() - rnd.pair_density.value();
        if (dev2 < 0) dev2 = -dev2;
        CHECK(dev2 >= Rat(1, 4));
    }

    CHECK_THROWS_AS(is_epsilon_regular(blocks, {0, 1}, {1, 2}, Rat(1, 4), exhaustive_cfg()),
                    PreconditionError);
}

TEST_CASE("equalize_density_subsets certifies both directions") {
    auto complete = KUniformHypergraph::complete(2, {{0, 1, 2, 3}, {4, 5, 6, 7}});
    auto high =
        equalize_density_subsets(complete, complete.blocks(), {2, 2}, EqualizeDirection::high, 1);
    CHECK(hyperdensity(complete, high).value() == Rat(1));

    auto same =
        equalize_density_subsets(complete, complete.blocks(), {4, 4}, EqualizeDirection::low, 2);
    CHECK(same == complete.blocks());

    // Single edge over blocks of size 2, singleton targets, high direction:
    // only the edge tuple has density 1 >= d = 1/4.
    auto single = KUniformHypergraph::make(2, {{0, 1}, {2, 3}}, {{0, 2}});
    auto picked =
        equalize_density_subsets(single, single.blocks(), {1, 1}, EqualizeDirection::high, 3);
    CHECK(hyperdensity(single, picked).value() == Rat(1));

    for (int trial = 0; trial < 30; ++trial) {
        Rng rng(derive_seed(1500, trial));
        auto inst = planted_non_superregular(3, 5, Rat(2, 5), rng);
        Rat d0 = hyperdensity(inst.gamma, inst.blocks).value();
        std::vector<int> sizes{1 + rng.below_int(5), 1 + rng.below_int(5), 1 + rng.below_int(5)};
        auto hi = equalize_density_subsets(inst.gamma, inst.blocks, sizes,
                                           EqualizeDirection::high, derive_seed(1501, trial));
        auto lo = equalize_density_subsets(inst.gamma, inst.blocks, sizes, EqualizeDirection::low,
                                           derive_seed(1502, trial));
        CHECK(hyperdensity(inst.gamma, hi).value() >= d0);
        CHECK(hyperdensity(inst.gamma, lo).value() <= d0);
        for (int i = 0; i < 3; ++i) {
            CHECK(static_cast<int>(hi[static_cast<std::size_t>(i)].size()) ==
                  sizes[static_cast<std::size_t>(i)]);
            CHECK(static_cast<int>(lo[static_cast<std::size_t>(i)].size()) ==
                  sizes[static_cast<std::size_t>(i)]);
        }
    }
}

TEST_CASE("densify_step on the two-blocks fixture") {
    // d = 1/2, alpha = 1/2, k = 2: the returned pair is a complete 2x2 block
    // with density 1 >= (9/8)(1/2).
    Graph g = oracle::two_complete_blocks();
    auto gamma = bipartite_hypergraph(g, {0, 1, 2, 3}, {4, 5, 6, 7});
    Rat alpha(1, 2), beta(1, 4);
    auto rep = superregular_witness(gamma, gamma.blocks(), alpha, beta, exhaustive_cfg());
    REQUIRE_FALSE(rep.superregular);
    auto b = densify_step(gamma, gamma.blocks(), alpha, beta, rep.witness, 5);
    Rat db = hyperdensity(gamma, b).value();
    CHECK(db == Rat(1));
    CHECK(db >= Rat(9, 8) * Rat(1, 2));
    CHECK(b[0].size() == 2);
    CHECK(b[1].size() == 2);

    // Invalid witness (density >= beta) is a precondition error.
    CHECK_THROWS_AS(densify_step(gamma, gamma.blocks(), alpha, beta,
                                 {{0, 1}, {4, 5}}, 5),
                    PreconditionError);
}

TEST_CASE("densify_step at d = 2*beta with a zero-density witness") {
    // Planted empty corner and exact density accounting: output must reach
    // at least 2*beta*(1 + alpha^k/2), verified exactly.
    for (int trial = 0; trial < 20; ++trial) {
        Rng rng(derive_seed(1700, trial));
        Rat alpha(1, 3);
        auto inst = planted_non_superregular(2, 9, alpha, rng, 60 + static_cast<int>(rng.below(35)));
        Rat d = hyperdensity(inst.gamma, inst.blocks).value();
        Rat beta = d / 2;  // the tightest admissible beta
        if (beta >= Rat(1, 2) || beta <= 0) continue;
        auto rep =
            superregular_witness(inst.gamma, inst.blocks, alpha, beta, exhaustive_cfg());
        REQUIRE_FALSE(rep.superregular);  // the planted corner has density 0
        auto b = densify_step(inst.gamma, inst.blocks, alpha, beta, rep.witness,
                              derive_seed(1701, trial));
        CHECK(hyperdensity(inst.gamma, b).value() >= (Rat(1) + alpha * alpha / 2) * d);
    }
}

TEST_CASE("extract_superregular fixtures and trace invariants") {
    // Already superregular input: zero rounds, identity.
    auto complete = KUniformHypergraph::complete(2, {{0, 1, 2}, {3, 4, 5}});
    auto res = extract_superregular(complete, complete.blocks(), Rat(1, 3), Rat(1, 5),
                                    exhaustive_cfg());
    CHECK(res.rounds() == 0);
    CHECK(res.tuple == complete.blocks());
    CHECK(res.certified);

    // Two-blocks fixture: one densification round, then a complete block.
    Graph g = oracle::two_complete_blocks();
    auto gamma = bipartite_hypergraph(g, {0, 1, 2, 3}, {4, 5, 6, 7});
    auto res2 = extract_superregular(gamma, gamma.blocks(), Rat(1, 2), Rat(1, 4),
                                     exhaustive_cfg());
    CHECK(res2.rounds() == 1);
    CHECK(res2.certified);
    CHECK(hyperdensity(gamma, res2.tuple).value() == Rat(1));

    // Random planted instances: per-round exact growth and the round bound.
    for (int trial = 0; trial < 20; ++trial) {
        Rng rng(derive_seed(1800, trial));
        Rat alpha(1, 4), beta(1, 6);
        auto inst = planted_non_superregular(2, 10, alpha, rng);
        Rat d = hyperdensity(inst.gamma, inst.blocks).value();
        if (d < 2 * beta) continue;
        auto r = extract_superregular(inst.gamma, inst.blocks, alpha, beta, exhaustive_cfg());
        CHECK(r.certified);
        Rat last = d;
        for (const auto& round : r.trace) {
            Rat now = round.density.value();
            CHECK(now >= (Rat(1) + rat_pow(alpha, 2) / 2) * last);
            last = now;
        }
        double cap = 3.0 * std::pow(rat_to_double(alpha), -2.0) *
                     std::log(1.0 / rat_to_double(beta));
        CHECK(static_cast<double>(r.rounds()) <= std::ceil(cap));
        // final tuple passes the same-mode witness search
        auto final_rep =
            superregular_witness(inst.gamma, r.tuple, alpha, beta, exhaustive_cfg());
        CHECK(final_rep.superregular);
    }

    auto edgeless = KUniformHypergraph::make(2, {{0, 1}, {2, 3}}, {});
    CHECK_THROWS_AS(
        extract_superregular(edgeless, edgeless.blocks(), Rat(1, 5), Rat(1, 5), exhaustive_cfg()),
        PreconditionError);
}

TEST_CASE("superregular_matching fixtures and partition invariants") {
    // Complete k-partite: one class, empty residual.
    auto complete = KUniformHypergraph::complete(2, {{0, 1, 2, 3}, {4, 5, 6, 7}});
    auto m = superregular_matching(complete, complete.blocks(), Rat(1, 2), Rat(1, 2), Rat(1, 4),
                                   Rat(1, 5), exhaustive_cfg(), MatchingPrecondition::verify);
    CHECK(m.completed);
    CHECK(m.classes.size() == 1);
    CHECK(m.residual[0].empty());
    CHECK(m.residual[1].empty());

    // Edgeless tuple: d = 0 < 2*beta is a precondition failure.
    auto edgeless = KUniformHypergraph::make(2, {{0, 1}, {2, 3}}, {});
    CHECK_THROWS_AS(
        superregular_matching(edgeless, edgeless.blocks(), Rat(1, 2), Rat(1, 2), Rat(1, 5),
                              Rat(1, 5), exhaustive_cfg(), MatchingPrecondition::assume),
        PreconditionError);

    for (int trial = 0; trial < 12; ++trial) {
        Rng rng(derive_seed(1900, trial));
        Rat alpha(1, 4), beta(1, 8), c(1, 2);
        auto inst = planted_non_superregular(2, 8, alpha, rng);
        Rat d = hyperdensity(inst.gamma, inst.blocks).value();
        if (d < 2 * beta) continue;
        auto res = superregular_matching(inst.gamma, inst.blocks, c, d, alpha, beta,
                                         exhaustive_cfg(), MatchingPrecondition::assume);
        long long n = 8;
        // classes and residual partition each block; class sizes equal per j
        for (int i = 0; i < 2; ++i) {
            std::set<int> seen(inst.blocks[static_cast<std::size_t>(i)].begin(),
                               inst.blocks[static_cast<std::size_t>(i)].end());
            std::size_t covered = res.residual[static_cast<std::size_t>(i)].size();
            for (const auto& cls : res.classes) {
                covered += cls[static_cast<std::size_t>(i)].size();
                for (int v : cls[static_cast<std::size_t>(i)]) CHECK(seen.count(v) == 1);
            }
            CHECK(covered == static_cast<std::size_t>(n));
        }
        for (const auto& cls : res.classes) CHECK(cls[0].size() == cls[1].size());
        if (res.completed)
            CHECK(BigInt(res.residual[0].size()) * rat_den(c) < rat_num(c) * BigInt(n));
        // every class re-certifies as superregular
        for (const auto& cls : res.classes) {
            auto rep = superregular_witness(inst.gamma, cls, alpha, beta, exhaustive_cfg());
            CHECK(rep.superregular);
        }
        // r bound (astronomic in general; sanity-check it is respected)
        double bound = rat_to_double(Rat(1) / c) *
                       std::pow(rat_to_double(alpha),
                                -3.0 * std::pow(rat_to_double(alpha), -2.0) *
                                    std::log(1.0 / rat_to_double(beta)));
        if (std::isfinite(bound))
            CHECK(static_cast<double>(res.classes.size()) <= bound + 1.0);
    }
}
