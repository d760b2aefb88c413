// The key shattering construction: given h equal-size disjoint vertex sets
// with few partite copies of H, produce a pair of partitions of (V_i, V_j)
// for some pattern edge (i,j) putting a constant fraction of the pair mass
// into blocks of density below alpha.
//
// The recursion on h follows the two-case proof. Case 1 (the (h-1)-partite
// copy hypergraph is not superregular): equalize the witness down to
// ceil((1-1/h) n), recurse on the induced prefix pattern, then append the
// residuals as final parts. Case 2 (superregular): partition the first h-1
// sets by a superregular matching, split V_h by neighbor-degree signatures
// over the matched blocks, and keep the best pair.
//
// Every returned shattering is exact-verified; when the partite copy count
// exceeds the level threshold the outcome is instead a failure certificate
// listing the copies found.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "removal_lab/count.hpp"
#include "removal_lab/errors.hpp"
#include "removal_lab/graph.hpp"
#include "removal_lab/hypergraph.hpp"
#include "removal_lab/partition.hpp"
#include "removal_lab/pattern.hpp"
#include "removal_lab/regularity.hpp"

namespace removal_lab {

// Exact tiny rational standing in for the theoretical ladder values
// d_k = 2^{-(2/alpha)^{k^2}} inside comparisons. Every density appearing at
// desk scale has denominator far below 2^4096, and for such densities the
// predicates d < d_k and d >= 2 d_k coincide for every threshold in
// (0, 2^-4096], so the surrogate decides them exactly as the true values
// would. The true symbolic values live in tower.hpp.
inline const Rat& theoretical_surrogate() {
    static const Rat tiny = Rat(BigInt(1), BigInt(1) << 4096);
    return tiny;
}

struct ShatterConstants {
    bool theoretical = true;
    std::map<int, Rat> d_ladder;        // level k -> d_k override
    std::optional<Rat> beta_override;   // Case-2 matching beta (default d_{k-1}/2)
    int min_block_size = 1;             // scale floor for matched blocks
    WitnessSearchConfig witness;

    static ShatterConstants theoretical_mode(WitnessSearchConfig w = {}) {
        ShatterConstants c;
        c.theoretical = true;
        c.witness = w;
        return c;
    }

    static ShatterConstants override_mode(std::map<int, Rat> ladder, WitnessSearchConfig w = {}) {
        ShatterConstants c;
        c.theoretical = false;
        for (const auto& [level, dk] : ladder) {
            if (level < 2) throw PreconditionError("constants: ladder levels start at 2");
            if (dk <= 0 || dk >= 1)
                throw PreconditionError("constants: d_k overrides must lie in (0, 1)");
        }
        c.d_ladder = std::move(ladder);
        c.witness = w;
        return c;
    }

    Rat d_level(int level) const {
        if (theoretical) return theoretical_surrogate();
        auto it = d_ladder.find(level);
        if (it == d_ladder.end())
            throw PreconditionError("constants: missing d_" + std::to_string(level) +
                                    " override");
        return it->second;
    }

    Rat copy_threshold(int level, long long block_size) const {
        Rat nk(1);
        for (int i = 0; i < level; ++i) nk *= Rat(block_size);
        return d_level(level) * nk;
    }
};

struct Shattering {
    std::pair<int, int> pattern_edge;  // (i, j) with j the shattered pair's second vertex
    std::vector<int> set_a, set_b;     // V_i and V_j
    SetPartition part_a, part_b;
    Rat alpha;
    Rat c_achieved;
    int t = 0;
};

struct FailureCertificate {
    std::vector<std::vector<int>> copies;  // partite copies, indexed by pattern vertex
    Rat threshold;
};

struct ShatterOutcome {
    std::optional<Shattering> shattering;
    std::optional<FailureCertificate> failure;
    std::vector<std::string> log;

    bool shattered() const { return shattering.has_value(); }
};

// The auxiliary (h-1)-partite hypergraph: (v_1,...,v_{h-1}) is an edge iff the
// tuple is a partite copy of the prefix pattern.
inline KUniformHypergraph build_pattern_hypergraph(const Graph& g, const Pattern& prefix,
                                                   const std::vector<std::vector<int>>& parts,
                                                   long long edge_budget = 5'000'000) {
    if (static_cast<int>(parts.size()) != prefix.vertex_count())
        throw PreconditionError("pattern hypergraph: expected one part per pattern vertex");
    std::vector<std::vector<int>> edges;
    bool over = false;
    enumerate_partite_copies(g, prefix, parts, [&](const std::vector<int>& image) {
        if (static_cast<long long>(edges.size()) >= edge_budget) {
            over = true;
            return false;
        }
        edges.push_back(image);
        return true;
    });
    if (over) throw BudgetError("pattern hypergraph: edge budget exceeded");
    return KUniformHypergraph::make(prefix.vertex_count(), parts, std::move(edges));
}

// Exact (c_achieved, t) of a candidate shattering: c_achieved is the fraction
// of |A||B| mass in block pairs of density < alpha, t = max part count.
inline std::pair<Rat, int> verify_shattering(const Graph& g, const std::vector<int>& a,
                                             const std::vector<int>& b, const SetPartition& pa,
                                             const SetPartition& pb, const Rat& alpha) {
    pa.validate(a);
    pb.validate(b);
    BigInt mass = 0;
    for (const auto& ap : pa.parts) {
        for (const auto& bp : pb.parts) {
            Density d = density(g, ap, bp);
            if (d.value() < alpha) mass += BigInt(ap.size()) * BigInt(bp.size());
        }
    }
    Rat c(mass, BigInt(a.size()) * BigInt(b.size()));
    int t = std::max(pa.part_count(), pb.part_count());
    return {c, t};
}

struct SignaturePartition {
    SetPartition partition;
    // signatures[p] lists the (i, j) block coordinates where every vertex of
    // part p has fewer than alpha*|V_{i,j}| neighbors.
    std::vector<std::vector<std::pair<int, int>>> signatures;
};

struct SignatureBlock {
    int i;  // pattern vertex (a neighbor of the last one)
    int j;  // matching class index, 1-based like the construction
    std::vector<int> verts;
};

// Splits V_h by which blocks a vertex has fewer than alpha*|block| neighbors
// in. Empty signature classes are omitted; classes are ordered by signature
// bitmask over the block list.
inline SignaturePartition degree_signature_partition(const Graph& g,
                                                     const std::vector<int>& v_last,
                                                     const std::vector<SignatureBlock>& blocks,
                                                     const Rat& alpha) {
    std::vector<VertexMask> masks;
    masks.reserve(blocks.size());
    for (const auto& b : blocks) masks.push_back(VertexMask::of(g.vertex_count(), b.verts));

    std::map<std::vector<bool>, std::vector<int>> classes;
    for (int v : v_last) {
        std::vector<bool> sig(blocks.size(), false);
        for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
            long long deg = g.degree_into(v, masks[bi]);
            // deg < alpha * |block|, exact
            sig[bi] = BigInt(deg) * rat_den(alpha) <
                      rat_num(alpha) * BigInt(blocks[bi].verts.size());
        }
        classes[sig].push_back(v);
    }
    SignaturePartition out;
    for (auto& [sig, verts] : classes) {
        std::vector<std::pair<int, int>> coords;
        for (std::size_t bi = 0; bi < blocks.size(); ++bi)
            if (sig[bi]) coords.emplace_back(blocks[bi].i, blocks[bi].j);
        out.partition.parts.push_back(std::move(verts));
        out.signatures.push_back(std::move(coords));
    }
    return out;
}

namespace detail {

inline ShatterOutcome shatter_level(const Graph& g, const Pattern& pattern,
                                    const std::vector<std::vector<int>>& parts, const Rat& alpha,
                                    const ShatterConstants& constants, std::uint64_t seed);

inline Shattering finalize_shattering(const Graph& g, std::pair<int, int> edge,
                                      const std::vector<int>& a, const std::vector<int>& b,
                                      SetPartition pa, SetPartition pb, const Rat& alpha) {
    auto [c, t] = verify_shattering(g, a, b, pa, pb, alpha);
    Shattering s;
    s.pattern_edge = edge;
    s.set_a = a;
    s.set_b = b;
    s.part_a = std::move(pa);
    s.part_b = std::move(pb);
    s.alpha = alpha;
    s.c_achieved = c;
    s.t = t;
    return s;
}

inline ShatterOutcome shatter_level(const Graph& g, const Pattern& pattern,
                                    const std::vector<std::vector<int>>& parts, const Rat& alpha,
                                    const ShatterConstants& constants, std::uint64_t seed) {
    int k = pattern.vertex_count();
    long long n = static_cast<long long>(parts[0].size());
    ShatterOutcome out;

    // Copy budget for this level. Exceeding it is the "many copies" branch:
    // the certificate lists strictly more than threshold distinct copies.
    Rat threshold = constants.copy_threshold(k, n);
    long long cap = threshold < 0 ? 0 : floor_mul(threshold, 1) + 1;
    if (cap > 1'000'000)
        throw BudgetError("shatter: copy threshold too large to certify by listing");
    std::vector<std::vector<int>> copies;
    enumerate_partite_copies(g, pattern, parts, [&](const std::vector<int>& image) {
        copies.push_back(image);
        return static_cast<long long>(copies.size()) < cap;
    });
    if (BigInt(copies.size()) * rat_den(threshold) > rat_num(threshold)) {
        out.log.push_back("level " + std::to_string(k) + ": copy threshold exceeded");
        out.failure = FailureCertificate{std::move(copies), threshold};
        return out;
    }

    if (k == 2) {
        // Base case: the pair (V_1, V_2) itself carries at most threshold
        // edges; the trivial partitions shatter it whenever d < alpha.
        SetPartition pa{{parts[0]}}, pb{{parts[1]}};
        out.shattering =
            finalize_shattering(g, {0, 1}, parts[0], parts[1], std::move(pa), std::move(pb), alpha);
        out.log.push_back("level 2: base case, d = " +
                          rat_string(density(g, parts[0], parts[1]).value()));
        return out;
    }

    Pattern prefix = pattern.induced_prefix(k - 1);
    std::vector<std::vector<int>> head(parts.begin(), parts.end() - 1);
    KUniformHypergraph gamma = build_pattern_hypergraph(g, prefix, head);

    Rat c_sr(k - 1, k);  // 1 - 1/k
    Rat d_prev = constants.d_level(k - 1);
    auto rep = superregular_witness(gamma, head, c_sr, d_prev,
                                    constants.witness.with_seed(derive_seed(seed, 0x5a, k)));

    if (!rep.superregular) {
        // Case 1: recurse on the equalized witness, then append residuals.
        long long n_eq = ceil_mul(c_sr, n);
        std::vector<int> sizes(static_cast<std::size_t>(k - 1), static_cast<int>(n_eq));
        auto w = equalize_density_subsets(gamma, rep.witness, sizes, EqualizeDirection::low,
                                          derive_seed(seed, 0x5b, k));
        out.log.push_back("level " + std::to_string(k) + ": case 1, witness density " +
                          rat_string(rep.witness_density.value()));
        if (prefix.edge_count() == 0)
            throw std::logic_error("shatter: witnessed sparse tuple for an edgeless prefix");
        ShatterOutcome inner =
            shatter_level(g, prefix, w, alpha, constants, derive_seed(seed, 0x5c, k));
        if (!inner.shattered())
            throw std::logic_error(
                "shatter: inner level exceeded its copy budget despite the witness bound");
        for (auto& line : inner.log) out.log.push_back(std::move(line));

        Shattering s = std::move(*inner.shattering);
        auto [i, j] = s.pattern_edge;
        SetPartition pa = std::move(s.part_a);
        SetPartition pb = std::move(s.part_b);
        // Residual parts V_i \ W_i and V_j \ W_j go last.
        VertexMask in_a = VertexMask::of(g.vertex_count(), s.set_a);
        VertexMask in_b = VertexMask::of(g.vertex_count(), s.set_b);
        std::vector<int> res_a, res_b;
        for (int v : parts[static_cast<std::size_t>(i)])
            if (!in_a.contains(v)) res_a.push_back(v);
        for (int v : parts[static_cast<std::size_t>(j)])
            if (!in_b.contains(v)) res_b.push_back(v);
        if (!res_a.empty()) pa.parts.push_back(std::move(res_a));
        if (!res_b.empty()) pb.parts.push_back(std::move(res_b));
        out.shattering = finalize_shattering(g, {i, j}, parts[static_cast<std::size_t>(i)],
                                             parts[static_cast<std::size_t>(j)], std::move(pa),
                                             std::move(pb), alpha);
        return out;
    }

    // Case 2: superregular (certified or unrefuted).
    std::vector<int> last_neighbors;
    for (int i = 0; i < k - 1; ++i)
        if (pattern.adjacent(i, k - 1)) last_neighbors.push_back(i);
    if (last_neighbors.empty())
        throw BudgetError(
            "shatter: scale-infeasible — superregular tuple but the last pattern vertex is "
            "isolated, so neither case applies at this size");

    Rat beta = constants.beta_override.value_or(d_prev / 2);
    auto matching = superregular_matching(
        gamma, head, c_sr, d_prev, alpha, beta,
        constants.witness.with_seed(derive_seed(seed, 0x5d, k)), MatchingPrecondition::assume);
    int z = static_cast<int>(matching.classes.size());
    out.log.push_back("level " + std::to_string(k) + ": case 2, z = " + std::to_string(z) +
                      (matching.completed ? "" : " (partial matching)"));
    if (z == 0)
        throw BudgetError("shatter: scale-infeasible — superregular matching produced no class");
    for (const auto& cls : matching.classes)
        for (const auto& blk : cls)
            if (static_cast<int>(blk.size()) < constants.min_block_size)
                throw BudgetError("shatter: scale-infeasible — matched block below size floor");

    std::vector<SignatureBlock> blocks;
    for (int i : last_neighbors)
        for (int j = 0; j < z; ++j)
            blocks.push_back(SignatureBlock{
                i, j + 1, matching.classes[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]});
    SignaturePartition sig =
        degree_signature_partition(g, parts[static_cast<std::size_t>(k - 1)], blocks, alpha);

    std::optional<Shattering> best;
    for (int i : last_neighbors) {
        SetPartition pa;
        for (int j = 0; j < z; ++j)
            pa.parts.push_back(
                matching.classes[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]);
        if (!matching.residual[static_cast<std::size_t>(i)].empty())
            pa.parts.push_back(matching.residual[static_cast<std::size_t>(i)]);
        Shattering cand = finalize_shattering(
            g, {i, k - 1}, parts[static_cast<std::size_t>(i)],
            parts[static_cast<std::size_t>(k - 1)], std::move(pa),
            SetPartition{sig.partition.parts}, alpha);
        if (!best || cand.c_achieved > best->c_achieved) best = std::move(cand);
    }
    out.shattering = std::move(best);
    return out;
}

}  // namespace detail

// Entry point; parts must be disjoint, nonempty and of equal size, indexed by
// the pattern's vertices.
inline ShatterOutcome shatter_pair(const Graph& g, const Pattern& pattern,
                                   const std::vector<std::vector<int>>& parts, const Rat& alpha,
                                   const ShatterConstants& constants, std::uint64_t seed) {
    if (pattern.edge_count() == 0)
        throw PreconditionError("shatter: pattern needs at least one edge");
    if (static_cast<int>(parts.size()) != pattern.vertex_count())
        throw PreconditionError("shatter: expected one part per pattern vertex");
    if (alpha <= 0 || alpha >= Rat(1, 4))
        throw PreconditionError("shatter: alpha must lie in (0, 1/4)");
    std::size_t n = parts[0].size();
    if (n == 0) throw PreconditionError("shatter: empty part");
    for (const auto& p : parts)
        if (p.size() != n) throw PreconditionError("shatter: parts must have equal size");
    return detail::shatter_level(g, pattern, parts, alpha, constants, seed);
}

}  // namespace removal_lab
