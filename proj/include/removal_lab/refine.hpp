// The refinement engine: equalizing refinement, the entropy-increment
// refinement step (delete, shatter, common-refine, equalize), and the full
// removal process loop with its trace.
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "removal_lab/count.hpp"
#include "removal_lab/entropy.hpp"
#include "removal_lab/errors.hpp"
#include "removal_lab/graph.hpp"
#include "removal_lab/packing.hpp"
#include "removal_lab/parallel.hpp"
#include "removal_lab/partition.hpp"
#include "removal_lab/pattern.hpp"
#include "removal_lab/shattering.hpp"
#include "removal_lab/tower.hpp"

namespace removal_lab {

struct EqualizeResult {
    Partition partition;
    long long r = 1;
};

// Refinement into parts of size at most r with all but upsilon*n vertices in
// parts of size exactly r; at most (2/upsilon + 1)k parts. When k > upsilon*n
// the result is the singleton partition with r = 1.
inline EqualizeResult equalize_refine(const Partition& q, const Rat& upsilon) {
    if (upsilon <= 0) throw PreconditionError("equalize_refine: upsilon must be positive");
    long long n = q.vertex_count();
    long long k = q.part_count();
    if (BigInt(k) * rat_den(upsilon) > rat_num(upsilon) * BigInt(n))
        return EqualizeResult{Partition::singletons(static_cast<int>(n)), 1};

    long long r = floor_mul(upsilon / Rat(k), n);  // floor(upsilon * n / k) >= 1
    std::vector<std::vector<int>> parts;
    for (const auto& part : q.parts()) {
        std::size_t i = 0;
        while (i + static_cast<std::size_t>(r) <= part.size()) {
            parts.emplace_back(part.begin() + static_cast<std::ptrdiff_t>(i),
                               part.begin() + static_cast<std::ptrdiff_t>(i + r));
            i += static_cast<std::size_t>(r);
        }
        if (i < part.size())
            parts.emplace_back(part.begin() + static_cast<std::ptrdiff_t>(i), part.end());
    }
    EqualizeResult out{Partition::from_parts(q.vertex_count(), std::move(parts)), r};

    // Part-count and stray-vertex bounds from the construction, exact.
    BigInt count(out.partition.part_count());
    if (count * rat_num(upsilon) > (2 * rat_den(upsilon) + rat_num(upsilon)) * BigInt(k))
        throw std::logic_error("equalize_refine: part-count bound violated");
    long long below = 0;
    for (const auto& part : out.partition.parts())
        if (static_cast<long long>(part.size()) < r) below += static_cast<long long>(part.size());
    if (BigInt(below) * rat_den(upsilon) > rat_num(upsilon) * BigInt(n))
        throw std::logic_error("equalize_refine: stray-vertex bound violated");
    return out;
}

struct DriverConstants {
    ShatterConstants shatter;
    std::optional<Rat> alpha_override;        // default eps0/20
    std::optional<long long> part_size_floor; // default ceil(eps0*n/8)
    long long max_iters = 32;
    bool exact_packing = false;
    int greedy_restarts = 8;
    long long exact_copy_budget = 200000;
};

struct DeletionAccounting {
    long long intra = 0;
    long long off_size = 0;
    long long low_density = 0;
    long long total() const { return intra + off_size + low_density; }
};

struct ShatteredPairLog {
    int part_i = 0, part_j = 0;  // partition part indices
    std::pair<int, int> pattern_edge{0, 0};
    Rat c_achieved;
    int t = 0;
    long long pair_edges = 0;   // e(P_i, P_j)
    bool qualifies = false;     // d(P_i,P_j) >= 10*alpha (exact)
    double claimed_gain = 0.0;  // (c/2) e / n^2 when qualifying, else 0
    Shattering shattering;      // the full object, for re-verification
};

struct StepReport {
    Partition refined;
    long long r = 1;
    double entropy_before = 0.0, entropy_after = 0.0;
    double gain = 0.0;
    double claimed_gain = 0.0;        // sum over distinct shattered pairs
    double theoretical_gain = 0.0;    // eps0 / (4 h^2)
    bool all_shatterings_succeeded = true;
    long long tuples_processed = 0;
    long long copies_skipped_repeated_parts = 0;
    std::vector<ShatteredPairLog> shattered;
    DeletionAccounting deletions;
    std::optional<FailureCertificate> failure;
    std::vector<int> failing_tuple_parts;
    long long parts_before = 0, parts_after = 0;
    int t_max = 1;
};

// One refinement step on a graph whose edge set is partitioned into
// eps0*n^2 copies of H (the packing supplies the copies). Deletes intra-part
// edges, edges meeting off-size parts and edges between sparse pairs;
// shatters the part tuples hosting surviving copies; common-refines each
// part; equalizes with upsilon = eps0/8.
inline StepReport refinement_step(const Graph& g, const Pattern& h, const Partition& p,
                                  const Packing& packing, const Rat& eps0, long long n0,
                                  const DriverConstants& constants, std::uint64_t seed) {
    int n = g.vertex_count();
    int hv = h.vertex_count();
    if (p.vertex_count() != n) throw PreconditionError("refinement step: partition mismatch");

    // The packing must partition E(G) exactly.
    validate_packing(g, h, packing);
    if (static_cast<long long>(packing.copies.size()) * h.edge_count() != g.edge_count())
        throw PreconditionError("refinement step: packing does not partition the edge set");
    if (eps0 != Rat(BigInt(packing.copies.size()), BigInt(n) * BigInt(n)))
        throw PreconditionError("refinement step: eps0 inconsistent with the packing");
    if (eps0 <= 0) throw PreconditionError("refinement step: eps0 must be positive");

    Rat alpha = constants.alpha_override.value_or(eps0 / 20);
    if (alpha <= 0 || alpha >= Rat(1, 4))
        throw PreconditionError("refinement step: alpha must lie in (0, 1/4)");

    // Part-size preconditions.
    long long stray = 0;
    for (const auto& part : p.parts()) {
        if (static_cast<long long>(part.size()) > n0)
            throw PreconditionError("refinement step: part larger than n0");
        if (static_cast<long long>(part.size()) != n0)
            stray += static_cast<long long>(part.size());
    }
    if (BigInt(stray) * 8 * rat_den(eps0) > rat_num(eps0) * BigInt(n))
        throw PreconditionError("refinement step: too many vertices outside size-n0 parts");

    StepReport report;
    report.parts_before = p.part_count();
    report.theoretical_gain = rat_to_double(eps0) / (4.0 * hv * hv);
    report.entropy_before = mean_entropy_density(g, p);

    // Cross-part edge counts; e(P_i, P_j) equals the plain edge count for
    // disjoint parts.
    std::map<std::pair<int, int>, long long> cross;
    for (auto [u, v] : g.edges()) {
        int pu = p.part_of(u), pv = p.part_of(v);
        if (pu == pv) continue;
        cross[{std::min(pu, pv), std::max(pu, pv)}] += 1;
    }
    auto pair_low_density = [&](long long edges_between) {
        // d < eps0/2 with d = edges / (n0 * n0)
        return BigInt(edges_between) * 2 * rat_den(eps0) <
               rat_num(eps0) * BigInt(n0) * BigInt(n0);
    };

    std::set<std::pair<int, int>> deleted;
    for (auto [u, v] : g.edges()) {
        int pu = p.part_of(u), pv = p.part_of(v);
        std::pair<int, int> e{std::min(u, v), std::max(u, v)};
        if (pu == pv) {
            report.deletions.intra++;
            deleted.insert(e);
        } else if (static_cast<long long>(p.part(pu).size()) != n0 ||
                   static_cast<long long>(p.part(pv).size()) != n0) {
            report.deletions.off_size++;
            deleted.insert(e);
        } else if (pair_low_density(cross[{std::min(pu, pv), std::max(pu, pv)}])) {
            report.deletions.low_density++;
            deleted.insert(e);
        }
    }
    // Accounting must stay within eps0 n^2 / 2 for the argument to go through.
    if (BigInt(report.deletions.total()) * 2 * rat_den(eps0) >
        rat_num(eps0) * BigInt(n) * BigInt(n))
        throw PreconditionError("refinement step: deleted-edge accounting exceeds eps0*n^2/2");

    // Distinct ordered part tuples hosting surviving packed copies.
    std::vector<std::vector<int>> tuples;
    std::set<std::vector<int>> tuple_set;
    for (const auto& image : packing.copies) {
        bool survives = true;
        for (auto e : copy_edges(h, image))
            if (deleted.count(e)) {
                survives = false;
                break;
            }
        if (!survives) continue;
        std::vector<int> tuple(static_cast<std::size_t>(hv));
        std::set<int> distinct;
        for (int i = 0; i < hv; ++i) {
            tuple[static_cast<std::size_t>(i)] = p.part_of(image[static_cast<std::size_t>(i)]);
            distinct.insert(tuple[static_cast<std::size_t>(i)]);
        }
        if (static_cast<int>(distinct.size()) != hv) {
            // Non-adjacent pattern vertices sharing a part: the tuple is not
            // a disjoint h-tuple, so the construction cannot be applied to it.
            report.copies_skipped_repeated_parts++;
            continue;
        }
        if (tuple_set.insert(tuple).second) tuples.push_back(std::move(tuple));
    }
    report.tuples_processed = static_cast<long long>(tuples.size());

    // Shatter each tuple; results merge in tuple order.
    std::vector<std::optional<ShatterOutcome>> outcomes(tuples.size());
    std::vector<std::string> errors(tuples.size());
    parallel_ranges(static_cast<long long>(tuples.size()), [&](long long begin, long long end,
                                                               int) {
        for (long long ti = begin; ti < end; ++ti) {
            std::vector<std::vector<int>> parts(static_cast<std::size_t>(hv));
            for (int i = 0; i < hv; ++i)
                parts[static_cast<std::size_t>(i)] =
                    p.part(tuples[static_cast<std::size_t>(ti)][static_cast<std::size_t>(i)]);
            try {
                outcomes[static_cast<std::size_t>(ti)] =
                    shatter_pair(g, h, parts, alpha, constants.shatter,
                                 derive_seed(seed, 0x57e9, static_cast<std::uint64_t>(ti)));
            } catch (const std::exception& e) {
                errors[static_cast<std::size_t>(ti)] = e.what();
            }
        }
    });
    for (std::size_t ti = 0; ti < tuples.size(); ++ti) {
        if (!errors[ti].empty()) throw BudgetError("refinement step: " + errors[ti]);
        const ShatterOutcome& outcome = *outcomes[ti];
        if (!outcome.shattered()) {
            report.all_shatterings_succeeded = false;
            report.failure = outcome.failure;
            for (int part : tuples[ti]) report.failing_tuple_parts.push_back(part);
            report.refined = p;
            report.parts_after = report.parts_before;
            report.entropy_after = report.entropy_before;
            return report;
        }
    }

    // Log shattered pairs; for each unordered part pair keep the best
    // c_achieved for the claimed gain, but refine with all of them.
    std::map<std::pair<int, int>, std::size_t> best_for_pair;
    for (std::size_t ti = 0; ti < tuples.size(); ++ti) {
        const Shattering& s = *outcomes[ti]->shattering;
        auto [i, j] = s.pattern_edge;
        int pi = tuples[ti][static_cast<std::size_t>(i)];
        int pj = tuples[ti][static_cast<std::size_t>(j)];
        ShatteredPairLog log;
        log.part_i = pi;
        log.part_j = pj;
        log.pattern_edge = s.pattern_edge;
        log.c_achieved = s.c_achieved;
        log.t = s.t;
        log.pair_edges = cross[{std::min(pi, pj), std::max(pi, pj)}];
        Density dpair = density(g, p.part(pi), p.part(pj));
        log.qualifies = dpair.value() >= Rat(10) * alpha;
        log.claimed_gain = log.qualifies
                               ? rat_to_double(log.c_achieved) / 2.0 *
                                     static_cast<double>(log.pair_edges) /
                                     (static_cast<double>(n) * static_cast<double>(n))
                               : 0.0;
        log.shattering = s;
        report.t_max = std::max(report.t_max, s.t);
        report.shattered.push_back(std::move(log));
        auto key = std::make_pair(std::min(pi, pj), std::max(pi, pj));
        auto it = best_for_pair.find(key);
        std::size_t li = report.shattered.size() - 1;
        if (it == best_for_pair.end() ||
            report.shattered[it->second].claimed_gain < report.shattered[li].claimed_gain)
            best_for_pair[key] = li;
    }
    for (const auto& [key, li] : best_for_pair)
        report.claimed_gain += report.shattered[li].claimed_gain;

    // Common refinement: each vertex of a part is keyed by its block index in
    // every shattering partition touching that part, ordered by pair id.
    std::vector<std::vector<std::pair<std::size_t, int>>> touching(
        static_cast<std::size_t>(p.part_count()));  // (log index, side 0/1)
    for (std::size_t li = 0; li < report.shattered.size(); ++li) {
        touching[static_cast<std::size_t>(report.shattered[li].part_i)].push_back({li, 0});
        touching[static_cast<std::size_t>(report.shattered[li].part_j)].push_back({li, 1});
    }
    std::vector<std::vector<int>> refined_parts;
    for (int part = 0; part < p.part_count(); ++part) {
        const auto& verts = p.part(part);
        if (touching[static_cast<std::size_t>(part)].empty()) {
            refined_parts.push_back(verts);
            continue;
        }
        std::map<std::vector<int>, std::vector<int>> classes;
        for (int v : verts) {
            std::vector<int> key;
            for (auto [li, side] : touching[static_cast<std::size_t>(part)]) {
                const SetPartition& sp = side == 0 ? report.shattered[li].shattering.part_a
                                                   : report.shattered[li].shattering.part_b;
                int block = -1;
                for (std::size_t b = 0; b < sp.parts.size() && block < 0; ++b)
                    if (std::find(sp.parts[b].begin(), sp.parts[b].end(), v) != sp.parts[b].end())
                        block = static_cast<int>(b);
                key.push_back(block);
            }
            classes[key].push_back(v);
        }
        for (auto& [key, verts_in_class] : classes) refined_parts.push_back(verts_in_class);
    }
    Partition common = Partition::from_parts(n, std::move(refined_parts));

    auto equalized = equalize_refine(common, eps0 / 8);
    report.refined = equalized.partition;
    report.r = equalized.r;
    report.parts_after = report.refined.part_count();
    report.entropy_after = mean_entropy_density(g, report.refined);
    report.gain = report.entropy_after - report.entropy_before;
    if (!is_refinement(p, report.refined))
        throw std::logic_error("refinement step: output does not refine the input");
    if (report.gain < report.claimed_gain - kEntropyTolerance)
        throw std::logic_error("refinement step: measured gain below the claimed bound");
    return report;
}

enum class TerminalStatus { removable, many_copies, entropy_ceiling, iteration_budget, infeasible };

inline const char* terminal_status_name(TerminalStatus s) {
    switch (s) {
        case TerminalStatus::removable: return "removable";
        case TerminalStatus::many_copies: return "many-copies";
        case TerminalStatus::entropy_ceiling: return "entropy-ceiling";
        case TerminalStatus::iteration_budget: return "iteration-budget";
        case TerminalStatus::infeasible: return "infeasible";
    }
    return "unknown";
}

struct TraceRecord {
    int step = 0;
    long long parts = 0;
    double entropy = 0.0;
    double gain = 0.0;
    double claimed_gain = 0.0;
    long long r = 1;
    std::vector<ShatteredPairLog> shattered;
    DeletionAccounting deletions;
    std::vector<int> assignment;
};

struct RemovalProcessResult {
    TerminalStatus status = TerminalStatus::infeasible;
    std::string message;
    std::vector<TraceRecord> records;
    std::vector<std::pair<int, int>> removable_certificate;
    std::optional<FailureCertificate> failure;
    Packing packing;
    Graph packed_union;
    Rat eps0;
    long long n0 = 1;
    Rat alpha;
    TheoreticalConstants theory;
};

// The removal process: pack, test e(G') against eps*n^2, then iterate the
// refinement step on the packing union until a terminal status.
inline RemovalProcessResult run_removal_process(const Graph& g, const Pattern& h, const Rat& eps,
                                                const DriverConstants& constants,
                                                std::uint64_t seed) {
    if (eps <= 0) throw PreconditionError("removal process: eps must be positive");
    int n = g.vertex_count();
    int hv = h.vertex_count();

    RemovalProcessResult result;

    // Packing: greedy with seeded restarts keeping the best, or exact.
    if (constants.exact_packing) {
        result.packing = packing_exact(g, h, constants.exact_copy_budget);
    } else {
        for (int restart = 0; restart < std::max(1, constants.greedy_restarts); ++restart) {
            Packing cand = packing_greedy(g, h, derive_seed(seed, 0xbe57, restart));
            if (cand.size() > result.packing.size()) result.packing = cand;
        }
    }
    result.packed_union = packing_union(g, h, result.packing);

    // Removable when the packing union is below the eps threshold: deleting
    // it leaves an H-free graph (the packing is maximal).
    if (BigInt(result.packed_union.edge_count()) * rat_den(eps) <
        rat_num(eps) * BigInt(n) * BigInt(n)) {
        result.status = TerminalStatus::removable;
        result.removable_certificate = result.packed_union.edges();
        Graph stripped = g.without_edges(result.removable_certificate);
        if (count_labeled_copies(stripped, h) != 0)
            throw std::logic_error("removal process: certificate leaves a copy behind");
        result.message = "packing union below eps*n^2";
        return result;
    }

    result.eps0 = Rat(BigInt(result.packing.copies.size()), BigInt(n) * BigInt(n));
    result.alpha = constants.alpha_override.value_or(result.eps0 / 20);
    long long default_n0 = std::max<long long>(1, ceil_mul(result.eps0 / 8, n));
    result.n0 = constants.part_size_floor.value_or(default_n0);
    try {
        if (result.n0 < 1 || result.n0 > n)
            throw PreconditionError("removal process: part size floor out of range");
        result.theory = theoretical_constants(hv, eps, result.alpha);

        // P_0: consecutive chunks of size n0 plus one remainder.
        std::vector<std::vector<int>> chunks;
        for (int v = 0; v < n; v += static_cast<int>(result.n0)) {
            std::vector<int> part;
            for (int u = v; u < std::min<long long>(n, v + result.n0); ++u) part.push_back(u);
            chunks.push_back(std::move(part));
        }
        Partition current = Partition::from_parts(n, std::move(chunks));

        TraceRecord initial;
        initial.step = 0;
        initial.parts = current.part_count();
        initial.entropy = mean_entropy_density(result.packed_union, current);
        initial.r = result.n0;
        initial.assignment = current.assignment();
        result.records.push_back(std::move(initial));

        double step_floor = rat_to_double(result.eps0) / (4.0 * hv * hv);
        for (long long iter = 0;; ++iter) {
            if (iter >= constants.max_iters) {
                result.status = TerminalStatus::iteration_budget;
                result.message = "iteration budget reached";
                return result;
            }
            long long n0_now = 0;
            for (const auto& part : current.parts())
                n0_now = std::max<long long>(n0_now, static_cast<long long>(part.size()));
            StepReport step = refinement_step(result.packed_union, h, current, result.packing,
                                              result.eps0, n0_now, constants,
                                              derive_seed(seed, 0x17e4, iter));
            if (!step.all_shatterings_succeeded) {
                result.status = TerminalStatus::many_copies;
                result.failure = step.failure;
                result.message = "a part tuple exceeded its copy threshold";
                return result;
            }
            TraceRecord rec;
            rec.step = static_cast<int>(iter) + 1;
            rec.parts = step.parts_after;
            rec.entropy = step.entropy_after;
            rec.gain = step.gain;
            rec.claimed_gain = step.claimed_gain;
            rec.r = step.r;
            rec.shattered = step.shattered;
            rec.deletions = step.deletions;
            rec.assignment = step.refined.assignment();
            result.records.push_back(std::move(rec));
            current = step.refined;
            // The functional is nonpositive; once another guaranteed-gain
            // step would push it past 0 the process must stop (the
            // contradiction the theoretical constants make impossible).
            if (step.entropy_after + step_floor > 1e-12) {
                result.status = TerminalStatus::entropy_ceiling;
                result.message = "a further step would push the nonpositive functional above 0";
                return result;
            }
        }
    } catch (const PreconditionError& e) {
        result.status = TerminalStatus::infeasible;
        result.message = e.what();
        return result;
    } catch (const BudgetError& e) {
        result.status = TerminalStatus::infeasible;
        result.message = e.what();
        return result;
    }
}

}  // namespace removal_lab
