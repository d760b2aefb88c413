// Superregularity machinery: witness search, density-equalized subsets,
// densification, superregular extraction and the superregular matching, plus
// the epsilon-regular pair diagnostic.
//
// Witness search is the computational hardness here. Exhaustive mode is exact
// on small blocks; the reduction to subsets of size exactly ceil(alpha*|A_i|)
// is sound because any larger low-density tuple contains an equal-sized one of
// no larger density (averaging). Randomized mode samples tuples and runs a
// single-swap hill descent on the exact edge count; it is one-sided: a
// returned witness is always exact-verified, while "superregular" is merely
// unrefuted.
#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "removal_lab/errors.hpp"
#include "removal_lab/graph.hpp"
#include "removal_lab/hypergraph.hpp"
#include "removal_lab/parallel.hpp"
#include "removal_lab/rational.hpp"
#include "removal_lab/rng.hpp"

namespace removal_lab {

enum class SearchMode { exhaustive, randomized };

struct WitnessSearchConfig {
    SearchMode mode = SearchMode::exhaustive;
    int exhaustive_block_limit = 14;
    long long exhaustive_work_limit = 400'000'000;
    long long samples = 10000;
    int descent_steps = 64;
    std::uint64_t seed = 0;

    WitnessSearchConfig with_seed(std::uint64_t s) const {
        WitnessSearchConfig c = *this;
        c.seed = s;
        return c;
    }
};

struct SuperregularityReport {
    bool superregular = true;
    bool certified = false;  // true only for exhaustive verdicts
    Rat alpha, beta;
    SearchMode mode = SearchMode::exhaustive;
    std::vector<std::vector<int>> witness;  // nonempty iff !superregular
    Density witness_density;
    long long samples_used = 0;
};

namespace detail {

// Exact edge count of the tuple given per-block membership masks.
inline long long tuple_edges(const KUniformHypergraph& gamma,
                             const std::vector<VertexMask>& masks) {
    return gamma.edges_in(masks);
}

inline std::vector<VertexMask> masks_of(const KUniformHypergraph& gamma,
                                        const std::vector<std::vector<int>>& sets) {
    std::vector<VertexMask> masks;
    masks.reserve(sets.size());
    for (const auto& s : sets) masks.push_back(VertexMask::of(gamma.ambient_size(), s));
    return masks;
}

// e < beta * prod(sizes), exactly.
inline bool below_beta(long long e, const Rat& beta, const std::vector<std::vector<int>>& sets) {
    BigInt prod = 1;
    for (const auto& s : sets) prod *= BigInt(s.size());
    return BigInt(e) * rat_den(beta) < rat_num(beta) * prod;
}

// Marginal edge counts used by descents and peels: for coordinate i,
// in_counts[v] = edges through v fully inside the tuple, out_counts[v] =
// edges with coordinate i at v and every other coordinate inside.
struct Marginals {
    std::vector<long long> in_counts;
    std::vector<long long> out_counts;
};

inline Marginals coordinate_marginals(const KUniformHypergraph& gamma,
                                      const std::vector<VertexMask>& masks, int coord) {
    Marginals m;
    m.in_counts.assign(static_cast<std::size_t>(gamma.ambient_size()), 0);
    m.out_counts.assign(static_cast<std::size_t>(gamma.ambient_size()), 0);
    int k = gamma.uniformity();
    for (const auto& edge : gamma.edges()) {
        int missing = -1;
        bool outside_other = false;
        for (int i = 0; i < k; ++i) {
            if (masks[static_cast<std::size_t>(i)].contains(edge[static_cast<std::size_t>(i)]))
                continue;
            if (i == coord && missing == -1) {
                missing = i;
            } else {
                outside_other = true;
                break;
            }
        }
        if (outside_other) continue;
        int v = edge[static_cast<std::size_t>(coord)];
        if (missing == -1) {
            m.in_counts[static_cast<std::size_t>(v)] += 1;
            m.out_counts[static_cast<std::size_t>(v)] += 1;  // also counts as "others inside"
        } else {
            m.out_counts[static_cast<std::size_t>(v)] += 1;
        }
    }
    return m;
}

// Enumerates all sorted size-m subsets of `pool` via index combinations.
class CombinationIter {
public:
    CombinationIter(int pool, int m) : pool_(pool), idx_(static_cast<std::size_t>(m)) {
        for (int i = 0; i < m; ++i) idx_[static_cast<std::size_t>(i)] = i;
        done_ = m > pool;
    }
    bool done() const { return done_; }
    const std::vector<int>& indices() const { return idx_; }
    void advance() {
        int m = static_cast<int>(idx_.size());
        int i = m - 1;
        while (i >= 0 && idx_[static_cast<std::size_t>(i)] == pool_ - m + i) --i;
        if (i < 0) {
            done_ = true;
            return;
        }
        ++idx_[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < m; ++j)
            idx_[static_cast<std::size_t>(j)] = idx_[static_cast<std::size_t>(j - 1)] + 1;
    }

private:
    int pool_;
    std::vector<int> idx_;
    bool done_ = false;
};

inline double binomial_estimate(int n, int m) {
    double v = 1.0;
    for (int i = 0; i < m; ++i) v *= static_cast<double>(n - i) / static_cast<double>(i + 1);
    return v;
}

}  // namespace detail

// Searches for a witness tuple (U_1,...,U_k), |U_i| >= alpha*|A_i|, with
// d(U_1,...,U_k) < beta. Any returned witness is exact-verified.
inline SuperregularityReport superregular_witness(const KUniformHypergraph& gamma,
                                                  const std::vector<std::vector<int>>& sets,
                                                  const Rat& alpha, const Rat& beta,
                                                  const WitnessSearchConfig& config) {
    int k = gamma.uniformity();
    if (static_cast<int>(sets.size()) != k)
        throw PreconditionError("superregular witness: expected one set per block");
    if (alpha <= 0 || alpha > 1 || beta <= 0 || beta > 1)
        throw PreconditionError("superregular witness: alpha, beta must lie in (0,1]");
    for (int i = 0; i < k; ++i) {
        if (sets[static_cast<std::size_t>(i)].empty())
            throw PreconditionError("superregular witness: empty set");
        for (int v : sets[static_cast<std::size_t>(i)])
            if (gamma.block_of(v) != i)
                throw PreconditionError("superregular witness: set outside its block");
    }

    SuperregularityReport report;
    report.alpha = alpha;
    report.beta = beta;
    report.mode = config.mode;

    std::vector<int> m(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        m[static_cast<std::size_t>(i)] =
            static_cast<int>(ceil_mul(alpha, static_cast<long long>(sets[static_cast<std::size_t>(i)].size())));

    auto accept_witness = [&](std::vector<std::vector<int>> witness) {
        long long e = detail::tuple_edges(gamma, detail::masks_of(gamma, witness));
        Density d;
        d.pairs = e;
        d.total = 1;
        for (const auto& s : witness) d.total *= BigInt(s.size());
        report.superregular = false;
        report.certified = config.mode == SearchMode::exhaustive;
        report.witness = std::move(witness);
        report.witness_density = d;
    };

    // The full tuple itself is always an admissible witness candidate.
    {
        long long e = detail::tuple_edges(gamma, detail::masks_of(gamma, sets));
        if (detail::below_beta(e, beta, sets)) {
            accept_witness(sets);
            report.certified = true;
            return report;
        }
    }

    BigInt size_prod = 1;
    for (int i = 0; i < k; ++i) size_prod *= BigInt(m[static_cast<std::size_t>(i)]);

    if (config.mode == SearchMode::exhaustive) {
        double work = static_cast<double>(gamma.edge_count()) + 1.0;
        for (int i = 0; i < k; ++i) {
            int sz = static_cast<int>(sets[static_cast<std::size_t>(i)].size());
            if (sz > config.exhaustive_block_limit)
                throw BudgetError("superregular witness: exhaustive block limit exceeded");
            if (i + 1 < k) work *= detail::binomial_estimate(sz, m[static_cast<std::size_t>(i)]);
        }
        if (work > static_cast<double>(config.exhaustive_work_limit))
            throw BudgetError("superregular witness: exhaustive work limit exceeded");

        // Enumerate exact-size subsets of blocks 0..k-2; the last block's
        // minimizer is the m smallest per-vertex counts (exact).
        std::vector<detail::CombinationIter> iters;
        std::vector<std::vector<int>> chosen(static_cast<std::size_t>(k));
        long long best_e = -1;
        std::vector<std::vector<int>> best_tuple;

        std::function<void(int)> enumerate = [&](int block) {
            if (block == k - 1) {
                std::vector<VertexMask> masks = detail::masks_of(gamma, chosen);
                // counts per candidate last-coordinate vertex
                const auto& pool = sets[static_cast<std::size_t>(k - 1)];
                std::vector<std::pair<long long, int>> counts;
                counts.reserve(pool.size());
                VertexMask pool_mask = VertexMask::of(gamma.ambient_size(), pool);
                std::vector<long long> per_vertex(static_cast<std::size_t>(gamma.ambient_size()), 0);
                for (const auto& edge : gamma.edges()) {
                    bool inside = true;
                    for (int i = 0; i < k - 1 && inside; ++i)
                        inside = masks[static_cast<std::size_t>(i)].contains(
                            edge[static_cast<std::size_t>(i)]);
                    int last = edge[static_cast<std::size_t>(k - 1)];
                    if (inside && pool_mask.contains(last))
                        per_vertex[static_cast<std::size_t>(last)] += 1;
                }
                for (int v : pool) counts.emplace_back(per_vertex[static_cast<std::size_t>(v)], v);
                std::sort(counts.begin(), counts.end());
                long long e = 0;
                std::vector<int> last;
                for (int i = 0; i < m[static_cast<std::size_t>(k - 1)]; ++i) {
                    e += counts[static_cast<std::size_t>(i)].first;
                    last.push_back(counts[static_cast<std::size_t>(i)].second);
                }
                if (best_e < 0 || e < best_e) {
                    best_e = e;
                    best_tuple = chosen;
                    std::sort(last.begin(), last.end());
                    best_tuple[static_cast<std::size_t>(k - 1)] = std::move(last);
                }
                return;
            }
            const auto& pool = sets[static_cast<std::size_t>(block)];
            detail::CombinationIter it(static_cast<int>(pool.size()), m[static_cast<std::size_t>(block)]);
            for (; !it.done(); it.advance()) {
                std::vector<int> sub;
                sub.reserve(it.indices().size());
                for (int idx : it.indices()) sub.push_back(pool[static_cast<std::size_t>(idx)]);
                chosen[static_cast<std::size_t>(block)] = std::move(sub);
                enumerate(block + 1);
            }
        };
        enumerate(0);

        report.certified = true;
        if (best_e >= 0 && BigInt(best_e) * rat_den(beta) < rat_num(beta) * size_prod) {
            accept_witness(best_tuple);
            report.certified = true;
        }
        return report;
    }

    // Randomized: seeded samples with single-swap hill descent on the exact
    // edge count. Lowest sample index wins across parallel ranges.
    std::atomic<long long> best_index{config.samples};
    std::vector<std::optional<std::vector<std::vector<int>>>> found_by_range(
        static_cast<std::size_t>(max_threads() * 4), std::nullopt);
    std::vector<long long> found_index_by_range(static_cast<std::size_t>(max_threads() * 4),
                                                std::numeric_limits<long long>::max());

    auto descend = [&](std::vector<std::vector<int>>& tuple, Rng& rng) -> bool {
        (void)rng;
        std::vector<VertexMask> masks = detail::masks_of(gamma, tuple);
        long long e = detail::tuple_edges(gamma, masks);
        for (int step = 0; step < config.descent_steps; ++step) {
            if (detail::below_beta(e, beta, tuple)) return true;
            long long best_delta = 0;
            int best_i = -1, best_out = -1, best_in = -1;
            for (int i = 0; i < k; ++i) {
                detail::Marginals marg = detail::coordinate_marginals(gamma, masks, i);
                const auto& inside = tuple[static_cast<std::size_t>(i)];
                const auto& pool = sets[static_cast<std::size_t>(i)];
                long long worst_in = -1;
                int v_in = -1;
                for (int v : inside) {
                    long long c = marg.in_counts[static_cast<std::size_t>(v)];
                    if (c > worst_in) {
                        worst_in = c;
                        v_in = v;
                    }
                }
                long long best_out_count = -1;
                int v_out = -1;
                for (int v : pool) {
                    if (masks[static_cast<std::size_t>(i)].contains(v)) continue;
                    long long c = marg.out_counts[static_cast<std::size_t>(v)];
                    if (best_out_count < 0 || c < best_out_count) {
                        best_out_count = c;
                        v_out = v;
                    }
                }
                if (v_in < 0 || v_out < 0) continue;
                long long delta = best_out_count - worst_in;
                if (delta < best_delta) {
                    best_delta = delta;
                    best_i = i;
                    best_in = v_in;
                    best_out = v_out;
                }
            }
            if (best_i < 0) return detail::below_beta(e, beta, tuple);
            auto& block = tuple[static_cast<std::size_t>(best_i)];
            block.erase(std::find(block.begin(), block.end(), best_in));
            block.insert(std::lower_bound(block.begin(), block.end(), best_out), best_out);
            masks[static_cast<std::size_t>(best_i)] =
                VertexMask::of(gamma.ambient_size(), block);
            e += best_delta;
        }
        return detail::below_beta(e, beta, tuple);
    };

    parallel_ranges(config.samples, [&](long long begin, long long end, int range) {
        for (long long idx = begin; idx < end; ++idx) {
            if (idx > best_index.load(std::memory_order_relaxed)) break;
            Rng rng(derive_seed(config.seed, 0x57ee, static_cast<std::uint64_t>(idx)));
            std::vector<std::vector<int>> tuple(static_cast<std::size_t>(k));
            for (int i = 0; i < k; ++i) {
                const auto& pool = sets[static_cast<std::size_t>(i)];
                auto pick = rng.sample_subset(static_cast<int>(pool.size()),
                                              m[static_cast<std::size_t>(i)]);
                for (int& x : pick) x = pool[static_cast<std::size_t>(x)];
                std::sort(pick.begin(), pick.end());
                tuple[static_cast<std::size_t>(i)] = std::move(pick);
            }
            if (descend(tuple, rng)) {
                long long prev = best_index.load(std::memory_order_relaxed);
                while (idx < prev &&
                       !best_index.compare_exchange_weak(prev, idx, std::memory_order_relaxed)) {
                }
                if (idx <= found_index_by_range[static_cast<std::size_t>(range)]) {
                    found_index_by_range[static_cast<std::size_t>(range)] = idx;
                    found_by_range[static_cast<std::size_t>(range)] = tuple;
                }
                break;
            }
        }
    });

    long long winner = std::numeric_limits<long long>::max();
    std::optional<std::vector<std::vector<int>>> winner_tuple;
    for (std::size_t r = 0; r < found_by_range.size(); ++r) {
        if (found_by_range[r] && found_index_by_range[r] < winner) {
            winner = found_index_by_range[r];
            winner_tuple = found_by_range[r];
        }
    }
    report.samples_used = config.samples;
    if (winner_tuple) accept_witness(*winner_tuple);
    return report;
}

struct EpsilonRegularityReport {
    bool regular = true;
    bool certified = false;
    Rat epsilon;
    Density pair_density;
    std::vector<int> witness_x, witness_y;
    Density witness_density;
};

// eps-regularity of a disjoint pair (X, Y): a witness is (X', Y') with
// |X'| >= eps|X|, |Y'| >= eps|Y| and |d(X',Y') - d(X,Y)| >= eps (exact).
// Exhaustive mode reduces to exact-size subsets (averaging both directions).
inline EpsilonRegularityReport is_epsilon_regular(const Graph& g, const std::vector<int>& x,
                                                  const std::vector<int>& y, const Rat& eps,
                                                  const WitnessSearchConfig& config) {
    if (x.empty() || y.empty()) throw PreconditionError("epsilon regular: empty side");
    for (int u : x)
        for (int v : y)
            if (u == v) throw PreconditionError("epsilon regular: sides must be disjoint");
    if (eps <= 0 || eps > 1) throw PreconditionError("epsilon regular: eps must lie in (0,1]");

    EpsilonRegularityReport report;
    report.epsilon = eps;
    report.pair_density = density(g, x, y);
    Rat d0 = report.pair_density.value();

    int mx = static_cast<int>(ceil_mul(eps, static_cast<long long>(x.size())));
    int my = static_cast<int>(ceil_mul(eps, static_cast<long long>(y.size())));

    auto deviation_ok = [&](long long e, int sx, int sy) {
        Rat d = Rat(BigInt(e), BigInt(sx) * BigInt(sy));
        Rat dev = d >= d0 ? d - d0 : d0 - d;
        return dev >= eps;
    };

    auto make_witness = [&](std::vector<int> wx, std::vector<int> wy) {
        report.regular = false;
        report.witness_density = density(g, wx, wy);
        report.witness_x = std::move(wx);
        report.witness_y = std::move(wy);
    };

    if (config.mode == SearchMode::exhaustive) {
        if (static_cast<int>(x.size()) > config.exhaustive_block_limit ||
            static_cast<int>(y.size()) > config.exhaustive_block_limit)
            throw BudgetError("epsilon regular: exhaustive block limit exceeded");
        report.certified = true;
        detail::CombinationIter it(static_cast<int>(x.size()), mx);
        for (; !it.done(); it.advance()) {
            std::vector<int> wx;
            wx.reserve(static_cast<std::size_t>(mx));
            for (int idx : it.indices()) wx.push_back(x[static_cast<std::size_t>(idx)]);
            VertexMask wx_mask = VertexMask::of(g.vertex_count(), wx);
            std::vector<std::pair<int, int>> degs;
            degs.reserve(y.size());
            for (int v : y) degs.emplace_back(g.degree_into(v, wx_mask), v);
            std::sort(degs.begin(), degs.end());
            long long e_min = 0, e_max = 0;
            std::vector<int> y_min, y_max;
            for (int i = 0; i < my; ++i) {
                e_min += degs[static_cast<std::size_t>(i)].first;
                y_min.push_back(degs[static_cast<std::size_t>(i)].second);
            }
            for (int i = 0; i < my; ++i) {
                auto& top = degs[degs.size() - 1 - static_cast<std::size_t>(i)];
                e_max += top.first;
                y_max.push_back(top.second);
            }
            if (deviation_ok(e_min, mx, my)) {
                make_witness(std::move(wx), std::move(y_min));
                return report;
            }
            if (deviation_ok(e_max, mx, my)) {
                make_witness(std::move(wx), std::move(y_max));
                return report;
            }
        }
        return report;
    }

    // Randomized one-sided search: sampled subset pairs, then greedy growth
    // toward extreme densities on the Y side.
    for (long long s = 0; s < config.samples; ++s) {
        Rng rng(derive_seed(config.seed, 0xe95, static_cast<std::uint64_t>(s)));
        auto pick_x = rng.sample_subset(static_cast<int>(x.size()), mx);
        std::vector<int> wx;
        wx.reserve(pick_x.size());
        for (int idx : pick_x) wx.push_back(x[static_cast<std::size_t>(idx)]);
        VertexMask wx_mask = VertexMask::of(g.vertex_count(), wx);
        std::vector<std::pair<int, int>> degs;
        for (int v : y) degs.emplace_back(g.degree_into(v, wx_mask), v);
        std::sort(degs.begin(), degs.end());
        long long e_min = 0, e_max = 0;
        std::vector<int> y_min, y_max;
        for (int i = 0; i < my; ++i) {
            e_min += degs[static_cast<std::size_t>(i)].first;
            y_min.push_back(degs[static_cast<std::size_t>(i)].second);
        }
        for (int i = 0; i < my; ++i) {
            auto& top = degs[degs.size() - 1 - static_cast<std::size_t>(i)];
            e_max += top.first;
            y_max.push_back(top.second);
        }
        if (deviation_ok(e_min, mx, my)) {
            make_witness(std::move(wx), std::move(y_min));
            return report;
        }
        if (deviation_ok(e_max, mx, my)) {
            make_witness(std::move(wx), std::move(y_max));
            return report;
        }
    }
    return report;
}

enum class EqualizeDirection { high, low };

// Subsets of sizes exactly a_i with density >= (high) or <= (low) the tuple
// density, per the averaging lemma. Randomized search first, then a greedy
// single-vertex peel whose every step preserves the target side exactly, so
// termination with a certificate is guaranteed.
inline std::vector<std::vector<int>> equalize_density_subsets(
    const KUniformHypergraph& gamma, const std::vector<std::vector<int>>& sets,
    const std::vector<int>& target_sizes, EqualizeDirection direction, std::uint64_t seed,
    long long random_tries = 64) {
    int k = gamma.uniformity();
    if (static_cast<int>(sets.size()) != k || static_cast<int>(target_sizes.size()) != k)
        throw PreconditionError("equalize: expected one set and target size per block");
    for (int i = 0; i < k; ++i) {
        int sz = static_cast<int>(sets[static_cast<std::size_t>(i)].size());
        int a = target_sizes[static_cast<std::size_t>(i)];
        if (a < 1 || a > sz)
            throw PreconditionError("equalize: target size out of range");
    }

    Rat d0 = hyperdensity(gamma, sets).value();
    auto meets_target = [&](const std::vector<std::vector<int>>& cand) {
        Rat d = hyperdensity(gamma, cand).value();
        return direction == EqualizeDirection::high ? d >= d0 : d <= d0;
    };

    for (long long t = 0; t < random_tries; ++t) {
        Rng rng(derive_seed(seed, 0x1ea, static_cast<std::uint64_t>(t)));
        std::vector<std::vector<int>> cand(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
            const auto& pool = sets[static_cast<std::size_t>(i)];
            auto pick = rng.sample_subset(static_cast<int>(pool.size()),
                                          target_sizes[static_cast<std::size_t>(i)]);
            for (int& xv : pick) xv = pool[static_cast<std::size_t>(xv)];
            std::sort(pick.begin(), pick.end());
            cand[static_cast<std::size_t>(i)] = std::move(pick);
        }
        if (meets_target(cand)) return cand;
    }

    // Greedy peel: remove, from the lowest over-sized block, the vertex whose
    // removal keeps the density extreme; ties break to the smallest vertex.
    std::vector<std::vector<int>> cur = sets;
    while (true) {
        int block = -1;
        for (int i = 0; i < k; ++i)
            if (static_cast<int>(cur[static_cast<std::size_t>(i)].size()) >
                target_sizes[static_cast<std::size_t>(i)]) {
                block = i;
                break;
            }
        if (block == -1) break;
        auto masks = detail::masks_of(gamma, cur);
        detail::Marginals marg = detail::coordinate_marginals(gamma, masks, block);
        int pick = -1;
        long long pick_count = 0;
        for (int v : cur[static_cast<std::size_t>(block)]) {
            long long c = marg.in_counts[static_cast<std::size_t>(v)];
            bool better = pick == -1 || (direction == EqualizeDirection::high ? c < pick_count
                                                                              : c > pick_count);
            if (better) {
                pick = v;
                pick_count = c;
            }
        }
        auto& blk = cur[static_cast<std::size_t>(block)];
        blk.erase(std::find(blk.begin(), blk.end(), pick));
    }
    if (!meets_target(cur))
        throw std::logic_error("equalize: averaging invariant violated");
    return cur;
}

// One densification round (the 2^k-block split): from a non-superregular
// tuple of equal size n with d >= 2*beta, returns equal subsets of size
// ceil(alpha*n) whose density is at least (1 + alpha^k/2) * d, exactly.
inline std::vector<std::vector<int>> densify_step(const KUniformHypergraph& gamma,
                                                  const std::vector<std::vector<int>>& sets,
                                                  const Rat& alpha, const Rat& beta,
                                                  const std::vector<std::vector<int>>& witness,
                                                  std::uint64_t seed = 0) {
    int k = gamma.uniformity();
    if (static_cast<int>(sets.size()) != k)
        throw PreconditionError("densify: expected one set per block");
    // The split argument needs ceil(alpha*n) <= n - ceil(alpha*n); alpha
    // beyond 1/2 can never satisfy it. beta < 1/2 follows from d >= 2*beta.
    if (alpha <= 0 || alpha > Rat(1, 2) || beta <= 0 || beta >= Rat(1, 2))
        throw PreconditionError("densify: requires 0 < alpha <= 1/2 and 0 < beta < 1/2");
    std::size_t n = sets[0].size();
    for (const auto& s : sets)
        if (s.size() != n) throw PreconditionError("densify: blocks must have equal size");
    if (n < 2 || 2 * ceil_mul(alpha, static_cast<long long>(n)) > static_cast<long long>(n))
        throw PreconditionError("densify: blocks too small to split at this alpha");
    Rat d = hyperdensity(gamma, sets).value();
    if (d < 2 * beta) throw PreconditionError("densify: requires d >= 2*beta");

    if (static_cast<int>(witness.size()) != k)
        throw PreconditionError("densify: witness arity mismatch");
    for (int i = 0; i < k; ++i) {
        const auto& w = witness[static_cast<std::size_t>(i)];
        const auto& s = sets[static_cast<std::size_t>(i)];
        for (int v : w)
            if (std::find(s.begin(), s.end(), v) == s.end())
                throw PreconditionError("densify: witness not inside the tuple");
        if (BigInt(w.size()) * rat_den(alpha) < rat_num(alpha) * BigInt(s.size()))
            throw PreconditionError("densify: witness blocks smaller than alpha fraction");
    }
    if (!detail::below_beta(detail::tuple_edges(gamma, detail::masks_of(gamma, witness)), beta,
                            witness))
        throw PreconditionError("densify: invalid witness (density not below beta)");

    int m = static_cast<int>(ceil_mul(alpha, static_cast<long long>(n)));
    std::vector<int> m_sizes(static_cast<std::size_t>(k), m);
    auto low = equalize_density_subsets(gamma, witness, m_sizes, EqualizeDirection::low,
                                        derive_seed(seed, 0xd1));

    // Split: A_{i,1} = low-density witness core, A_{i,2} = the rest.
    std::vector<std::vector<int>> part1 = low, part2(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        VertexMask in_low = VertexMask::of(gamma.ambient_size(), low[static_cast<std::size_t>(i)]);
        for (int v : sets[static_cast<std::size_t>(i)])
            if (!in_low.contains(v)) part2[static_cast<std::size_t>(i)].push_back(v);
    }

    // Pick the densest of the 2^k - 1 blocks other than (1,...,1); ties break
    // to the lexicographically smallest (j_1,...,j_k) selector, which orders
    // the candidate vertex sets.
    std::vector<unsigned> selectors;
    for (unsigned s = 1; s < (1u << k); ++s) selectors.push_back(s);
    std::sort(selectors.begin(), selectors.end(), [&](unsigned a, unsigned b) {
        for (int i = 0; i < k; ++i) {
            unsigned ba = (a >> i) & 1u, bb = (b >> i) & 1u;
            if (ba != bb) return ba < bb;
        }
        return false;
    });
    std::vector<std::vector<int>> best_block;
    Rat best_density(-1);
    for (unsigned selector : selectors) {
        std::vector<std::vector<int>> cand(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i)
            cand[static_cast<std::size_t>(i)] = (selector >> i) & 1u
                                                    ? part2[static_cast<std::size_t>(i)]
                                                    : part1[static_cast<std::size_t>(i)];
        Rat dv = hyperdensity(gamma, cand).value();
        if (dv > best_density) {
            best_density = dv;
            best_block = std::move(cand);
        }
    }

    Rat required = d * (Rat(1) + rat_pow(alpha, static_cast<unsigned>(k)) / 2);
    if (best_density < required)
        throw std::logic_error("densify: averaging bound violated (internal)");

    auto out = equalize_density_subsets(gamma, best_block, m_sizes, EqualizeDirection::high,
                                        derive_seed(seed, 0xd2));
    if (hyperdensity(gamma, out).value() < required)
        throw std::logic_error("densify: output density below the guaranteed bound");
    return out;
}

struct ExtractionRound {
    std::vector<std::vector<int>> tuple;
    Density density;
};

struct ExtractionResult {
    std::vector<std::vector<int>> tuple;
    std::vector<ExtractionRound> trace;  // one record per densification round
    bool certified = false;
    int rounds() const { return static_cast<int>(trace.size()); }
};

inline double extraction_round_bound(int k, const Rat& alpha, const Rat& beta) {
    double a = rat_to_double(alpha);
    double b = rat_to_double(beta);
    double bound = 3.0 * std::pow(a, -k) * std::log(1.0 / b);
    return bound;
}

// Repeated densification until the tuple certifies (or is unrefuted)
// superregular. Densities grow by a (1 + alpha^k/2) factor per round, so the
// round count never exceeds 3 alpha^-k log(1/beta).
inline ExtractionResult extract_superregular(const KUniformHypergraph& gamma,
                                             const std::vector<std::vector<int>>& sets,
                                             const Rat& alpha, const Rat& beta,
                                             const WitnessSearchConfig& config) {
    int k = gamma.uniformity();
    if (alpha <= 0 || alpha > Rat(1, 2) || beta <= 0 || beta >= Rat(1, 2))
        throw PreconditionError("extract: requires 0 < alpha <= 1/2 and 0 < beta < 1/2");
    std::size_t n = sets.empty() ? 0 : sets[0].size();
    for (const auto& s : sets)
        if (s.size() != n) throw PreconditionError("extract: blocks must have equal size");
    Rat d = hyperdensity(gamma, sets).value();
    if (d < 2 * beta) throw PreconditionError("extract: requires d >= 2*beta");

    ExtractionResult result;
    result.tuple = sets;
    Rat last_density = d;
    double round_cap = extraction_round_bound(k, alpha, beta);
    for (int round = 0;; ++round) {
        auto report = superregular_witness(gamma, result.tuple, alpha, beta,
                                           config.with_seed(derive_seed(config.seed, 0xe0, round)));
        if (report.superregular) {
            result.certified = report.certified;
            return result;
        }
        auto next = densify_step(gamma, result.tuple, alpha, beta, report.witness,
                                 derive_seed(config.seed, 0xe1, round));
        ExtractionRound rec;
        rec.tuple = next;
        Density dv = hyperdensity(gamma, next);
        rec.density = dv;
        Rat factor = Rat(1) + rat_pow(alpha, static_cast<unsigned>(k)) / 2;
        if (dv.value() < factor * last_density)
            throw std::logic_error("extract: density gain below the per-round factor");
        last_density = dv.value();
        result.trace.push_back(std::move(rec));
        result.tuple = std::move(next);
        if (std::isfinite(round_cap) && static_cast<double>(result.rounds()) > round_cap + 1.0)
            throw std::logic_error("extract: round bound exceeded (internal)");
    }
}

enum class MatchingPrecondition { verify, assume };

struct MatchingResult {
    // classes[j][i]: block i of the j-th superregular tuple (j = 1..r maps to
    // index j-1 here); residual[i] is A_{i,0}, possibly empty.
    std::vector<std::vector<std::vector<int>>> classes;
    std::vector<std::vector<int>> residual;
    std::vector<bool> certified;
    bool completed = true;  // false: density fell below 2*beta mid-loop
};

// Partitions a (c,d)-superregular tuple into superregular classes plus a
// residual of size < c*N per block.
inline MatchingResult superregular_matching(const KUniformHypergraph& gamma,
                                            const std::vector<std::vector<int>>& sets,
                                            const Rat& c, const Rat& d, const Rat& alpha,
                                            const Rat& beta, const WitnessSearchConfig& config,
                                            MatchingPrecondition precondition) {
    int k = gamma.uniformity();
    if (alpha <= 0 || alpha > Rat(1, 2) || beta <= 0 || beta >= Rat(1, 2))
        throw PreconditionError("matching: requires 0 < alpha <= 1/2 and 0 < beta < 1/2");
    if (d < 2 * beta) throw PreconditionError("matching: requires d >= 2*beta");
    std::size_t n = sets.empty() ? 0 : sets[0].size();
    for (const auto& s : sets)
        if (s.size() != n) throw PreconditionError("matching: blocks must have equal size");
    if (hyperdensity(gamma, sets).value() < d)
        throw PreconditionError("matching: tuple density below d");
    if (precondition == MatchingPrecondition::verify) {
        auto rep = superregular_witness(gamma, sets, c, d,
                                        config.with_seed(derive_seed(config.seed, 0x3a)));
        if (!rep.superregular)
            throw PreconditionError("matching: tuple is not (c,d)-superregular (witness found)");
    }

    long long big_n = static_cast<long long>(n);
    MatchingResult result;
    std::vector<std::vector<int>> residual = sets;
    for (int j = 0;; ++j) {
        long long res_size = static_cast<long long>(residual[0].size());
        if (BigInt(res_size) * rat_den(c) < rat_num(c) * BigInt(big_n)) break;
        Rat res_density = hyperdensity(gamma, residual).value();
        if (res_density < 2 * beta) {
            result.completed = false;
            break;
        }
        auto extraction = extract_superregular(
            gamma, residual, alpha, beta,
            config.with_seed(derive_seed(config.seed, 0x3b, static_cast<std::uint64_t>(j))));
        result.classes.push_back(extraction.tuple);
        result.certified.push_back(extraction.certified);
        for (int i = 0; i < k; ++i) {
            VertexMask taken =
                VertexMask::of(gamma.ambient_size(), extraction.tuple[static_cast<std::size_t>(i)]);
            std::vector<int> rest;
            for (int v : residual[static_cast<std::size_t>(i)])
                if (!taken.contains(v)) rest.push_back(v);
            residual[static_cast<std::size_t>(i)] = std::move(rest);
        }
    }
    result.residual = std::move(residual);
    return result;
}

}  // namespace removal_lab
