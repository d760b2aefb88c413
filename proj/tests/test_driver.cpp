#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "removal_lab/instances.hpp"
#include "removal_lab/io.hpp"
#include "removal_lab/refine.hpp"
#include "support/oracles.hpp"

using namespace removal_lab;

namespace {

DriverConstants rs_overrides(std::uint64_t seed, long long part_size) {
    DriverConstants dc;
    WitnessSearchConfig wc;
    wc.mode = SearchMode::randomized;
    wc.samples = 400;
    wc.seed = seed;
    dc.shatter = ShatterConstants::override_mode({{2, Rat(1, 20)}, {3, Rat(1, 20)}}, wc);
    dc.part_size_floor = part_size;
    return dc;
}

}  // namespace

TEST_CASE("equalize_refine hand-checked example") {
    // n = 10, parts of sizes {7,3}, upsilon = 1/2: r = 2, six parts, two
    // vertices in parts below size r.
    Partition q = Partition::from_parts(10, {{0, 1, 2, 3, 4, 5, 6}, {7, 8, 9}});
    auto res = equalize_refine(q, Rat(1, 2));
    CHECK(res.r == 2);
    CHECK(res.partition.part_count() == 6);
    long long below = 0;
    for (const auto& part : res.partition.parts())
        if (static_cast<long long>(part.size()) < res.r)
            below += static_cast<long long>(part.size());
    CHECK(below == 2);
    CHECK(is_refinement(q, res.partition));
}

TEST_CASE("equalize_refine edge cases") {
    // Singleton partition input: k = n > upsilon*n, unchanged with r = 1.
    Partition singles = Partition::singletons(8);
    auto res = equalize_refine(singles, Rat(1, 2));
    CHECK(res.r == 1);
    CHECK(res.partition.part_count() == 8);

    // k > upsilon*n forces the all-singletons refinement.
    Partition q = Partition::from_parts(6, {{0, 1, 2}, {3}, {4}, {5}});
    auto res2 = equalize_refine(q, Rat(1, 2));  // k = 4 > 3 = upsilon*n
    CHECK(res2.r == 1);
    CHECK(res2.partition.part_count() == 6);

    CHECK_THROWS_AS(equalize_refine(q, Rat(0)), PreconditionError);
}

TEST_CASE("equalize_refine bounds on random partitions") {
    for (int trial = 0; trial < 40; ++trial) {
        Rng rng(derive_seed(4100, trial));
        int n = 6 + rng.below_int(30);
        int k = 1 + rng.below_int(5);
        std::vector<int> assign(static_cast<std::size_t>(n));
        for (int v = 0; v < n; ++v) assign[static_cast<std::size_t>(v)] = v % k;
        Partition q = Partition::from_assignment(assign);
        Rat upsilon(1 + rng.below_int(4), 4);
        auto res = equalize_refine(q, upsilon);
        CHECK(is_refinement(q, res.partition));
        // all parts at most r; stray vertices at most upsilon*n
        long long stray = 0;
        for (const auto& part : res.partition.parts()) {
            CHECK(static_cast<long long>(part.size()) <= res.r);
            if (static_cast<long long>(part.size()) < res.r)
                stray += static_cast<long long>(part.size());
        }
        CHECK(BigInt(stray) * rat_den(upsilon) <= rat_num(upsilon) * BigInt(n));
        CHECK(BigInt(res.partition.part_count()) * rat_num(upsilon) <=
              (2 * rat_den(upsilon) + rat_num(upsilon)) * BigInt(q.part_count()));
    }
}

TEST_CASE("refinement_step on a lower-bound instance") {
    int m = 6;
    auto s = gen_behrend_set(m, BehrendStrategy::exhaustive);
    auto inst = gen_ruzsa_szemeredi(m, s);
    Pattern tri = Pattern::preset("triangle");

    // The planted triangles are pairwise edge-disjoint and cover all edges.
    Packing packing = packing_greedy(inst.graph, tri, 3);
    REQUIRE(packing.size() == static_cast<int>(inst.planted_triangles));
    Graph gp = packing_union(inst.graph, tri, packing);
    REQUIRE(gp.edge_count() == inst.graph.edge_count());

    int n = inst.graph.vertex_count();
    Rat eps0(static_cast<long long>(packing.size()), static_cast<long long>(n) * n);
    Partition p0 = [&] {
        std::vector<std::vector<int>> chunks;
        for (int v = 0; v < n; v += m) {
            std::vector<int> part;
            for (int u = v; u < v + m; ++u) part.push_back(u);
            chunks.push_back(std::move(part));
        }
        return Partition::from_parts(n, std::move(chunks));
    }();

    auto constants = rs_overrides(11, m);
    auto report = refinement_step(gp, tri, p0, packing, eps0, m, constants, 11);
    CHECK(report.all_shatterings_succeeded);
    CHECK(report.tuples_processed > 0);
    CHECK_FALSE(report.shattered.empty());
    CHECK(report.gain >= report.claimed_gain - 1e-9);
    CHECK(report.claimed_gain > 0.0);
    CHECK(is_refinement(p0, report.refined));
    // deleted-edge accounting within eps0 n^2 / 2
    CHECK(Rat(2 * report.deletions.total()) <= eps0 * n * n);
    // every logged shattering re-verifies with its claimed values
    for (const auto& log : report.shattered) {
        auto [c, t] = verify_shattering(gp, log.shattering.set_a, log.shattering.set_b,
                                        log.shattering.part_a, log.shattering.part_b,
                                        log.shattering.alpha);
        CHECK(c == log.c_achieved);
        CHECK(t == log.t);
    }
}

TEST_CASE("refinement_step rejects bad preconditions") {
    Graph k4 = oracle::complete_graph(4);
    Pattern tri = Pattern::preset("triangle");
    Packing empty;
    // empty packing on a graph with edges: not an edge partition
    CHECK_THROWS_AS(refinement_step(k4, tri, Partition::trivial(4), empty, Rat(0), 2,
                                    DriverConstants{}, 1),
                    PreconditionError);
}

TEST_CASE("run_removal_process: H-free input is removable with an empty certificate") {
    Graph pet = oracle::petersen();
    Pattern tri = Pattern::preset("triangle");
    DriverConstants dc;
    auto result = run_removal_process(pet, tri, Rat(1, 100), dc, 5);
    CHECK(result.status == TerminalStatus::removable);
    CHECK(result.removable_certificate.empty());
}

TEST_CASE("run_removal_process: sparse instances are removable with a verified certificate") {
    // A few planted triangles on an empty base: e(G') = 3*copies < eps*n^2.
    Graph base = parse_edge_list("30 0");
    Pattern tri = Pattern::preset("triangle");
    auto planted = gen_planted(base, tri, 3, 17);
    DriverConstants dc;
    auto result = run_removal_process(planted.graph, tri, Rat(1, 10), dc, 5);
    REQUIRE(result.status == TerminalStatus::removable);
    CHECK(result.removable_certificate.size() == 9);
    Graph stripped = planted.graph.without_edges(result.removable_certificate);
    CHECK(count_labeled_copies(stripped, tri) == 0);
}

TEST_CASE("run_removal_process: dense graph hits many-copies under tight thresholds") {
    Graph k6 = oracle::complete_graph(6);
    Pattern tri = Pattern::preset("triangle");
    DriverConstants dc;
    WitnessSearchConfig wc;
    wc.mode = SearchMode::randomized;
    wc.samples = 100;
    dc.shatter = ShatterConstants::override_mode({{2, Rat(1, 100)}, {3, Rat(1, 100)}}, wc);
    auto result = run_removal_process(k6, tri, Rat(1, 100), dc, 7);
    REQUIRE(result.status == TerminalStatus::many_copies);
    REQUIRE(result.failure.has_value());
    CHECK(result.records.size() <= 2);  // within one step
    for (const auto& image : result.failure->copies)
        CHECK(is_labeled_copy(result.packed_union, tri, image));
}

TEST_CASE("run_removal_process trace invariants on a lower-bound instance") {
    int m = 8;
    auto s = gen_behrend_set(m, BehrendStrategy::exhaustive);
    auto inst = gen_ruzsa_szemeredi(m, s);
    Pattern tri = Pattern::preset("triangle");
    auto dc = rs_overrides(23, m);
    auto result = run_removal_process(inst.graph, tri, Rat(1, 1000), dc, 23);

    REQUIRE(result.records.size() >= 2);  // at least one completed step
    CHECK(result.status != TerminalStatus::infeasible);
    double d = 2.0 * static_cast<double>(result.packed_union.edge_count()) /
               (36.0 * static_cast<double>(m) * static_cast<double>(m));
    for (std::size_t i = 0; i < result.records.size(); ++i) {
        const auto& rec = result.records[i];
        CHECK(rec.entropy <= 1e-9);
        CHECK(rec.entropy >= d * std::log(d) - 1e-9);
        if (i > 0) {
            CHECK(rec.entropy >= result.records[i - 1].entropy - 1e-9);
            CHECK(rec.gain >= rec.claimed_gain - 1e-9);
            CHECK(Rat(2 * rec.deletions.total()) <= result.eps0 * (36 * m * m));
            Partition prev = Partition::from_assignment(result.records[i - 1].assignment);
            Partition cur = Partition::from_assignment(rec.assignment);
            CHECK(is_refinement(prev, cur));
        }
    }
}

TEST_CASE("run_removal_process honors the iteration budget") {
    int m = 6;
    auto s = gen_behrend_set(m, BehrendStrategy::exhaustive);
    auto inst = gen_ruzsa_szemeredi(m, s);
    Pattern tri = Pattern::preset("triangle");
    auto dc = rs_overrides(31, m);
    dc.max_iters = 0;
    auto result = run_removal_process(inst.graph, tri, Rat(1, 1000), dc, 31);
    CHECK(result.status == TerminalStatus::iteration_budget);
    CHECK(result.records.size() == 1);
}

TEST_CASE("trace serialization round-trips through the CSV summary") {
    int m = 6;
    auto s = gen_behrend_set(m, BehrendStrategy::exhaustive);
    auto inst = gen_ruzsa_szemeredi(m, s);
    Pattern tri = Pattern::preset("triangle");
    auto dc = rs_overrides(37, m);
    auto result = run_removal_process(inst.graph, tri, Rat(1, 1000), dc, 37);

    std::string jsonl = trace_jsonl(result);
    std::istringstream in(jsonl);
    std::string csv = summarize_trace(in);
    CHECK(csv.find("step,parts,entropy") == 0);
    CHECK(csv.find(terminal_status_name(result.status)) != std::string::npos);
    // one line per record + header + status row
    long long lines = static_cast<long long>(std::count(csv.begin(), csv.end(), '\n'));
    CHECK(lines == static_cast<long long>(result.records.size()) + 2);

    // malformed traces are rejected
    std::istringstream bad("{\"step\": 0, \"parts\": 1}\n");
    CHECK_THROWS_AS(summarize_trace(bad), ParseError);
    std::istringstream junk("not json\n");
    CHECK_THROWS_AS(summarize_trace(junk), ParseError);

    // empty trace: header-only CSV
    std::istringstream empty("");
    CHECK(summarize_trace(empty) ==
          "step,parts,entropy,gain,claimed_gain,r,shattered_pairs,deleted_intra,"
          "deleted_off_size,deleted_low_density,deleted_total,status,certificate_size\n");
}

TEST_CASE("theoretical constants travel with the process result") {
    Graph pet = oracle::petersen();
    Pattern tri = Pattern::preset("triangle");
    int m = 6;
    auto s = gen_behrend_set(m, BehrendStrategy::exhaustive);
    auto inst = gen_ruzsa_szemeredi(m, s);
    auto dc = rs_overrides(39, m);
    auto result = run_removal_process(inst.graph, tri, Rat(1, 1000), dc, 39);
    CHECK(result.theory.tower_height > 0);
    CHECK(TowerExpr::compare(result.theory.d_h, TowerExpr::rational(Rat(0))) > 0);
    CHECK(TowerExpr::compare(result.theory.d_h, TowerExpr::rational(Rat(1, 1000000))) < 0);
    (void)pet;
}
