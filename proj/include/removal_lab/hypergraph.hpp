// k-partite k-uniform hypergraphs over designated vertex blocks, with the
// exact tuple density d(A_1,...,A_k) = e(A_1,...,A_k) / (|A_1|...|A_k|).
#pragma once

#include <algorithm>
#include <vector>

#include "removal_lab/errors.hpp"
#include "removal_lab/graph.hpp"

namespace removal_lab {

class KUniformHypergraph {
public:
    KUniformHypergraph() = default;

    // blocks: k disjoint vertex sets over a shared ambient index space.
    // Every edge has exactly one vertex in block i, for each i.
    static KUniformHypergraph make(int k, std::vector<std::vector<int>> blocks,
                                   std::vector<std::vector<int>> edges) {
        if (k < 1) throw PreconditionError("hypergraph: k must be >= 1");
        if (static_cast<int>(blocks.size()) != k)
            throw PreconditionError("hypergraph: expected k blocks");
        KUniformHypergraph g;
        g.k_ = k;
        int ambient = 0;
        for (auto& b : blocks) {
            if (b.empty()) throw PreconditionError("hypergraph: empty block");
            std::sort(b.begin(), b.end());
            for (int v : b) {
                if (v < 0) throw PreconditionError("hypergraph: negative vertex");
                ambient = std::max(ambient, v + 1);
            }
        }
        g.block_of_.assign(static_cast<std::size_t>(ambient), -1);
        for (int i = 0; i < k; ++i) {
            for (int v : blocks[static_cast<std::size_t>(i)]) {
                if (g.block_of_[static_cast<std::size_t>(v)] != -1)
                    throw PreconditionError("hypergraph: blocks overlap");
                g.block_of_[static_cast<std::size_t>(v)] = i;
            }
        }
        for (auto& e : edges) {
            if (static_cast<int>(e.size()) != k)
                throw PreconditionError("hypergraph: edge arity mismatch");
            for (int i = 0; i < k; ++i) {
                int v = e[static_cast<std::size_t>(i)];
                if (v < 0 || v >= ambient || g.block_of_[static_cast<std::size_t>(v)] != i)
                    throw PreconditionError("hypergraph: edge coordinate outside its block");
            }
        }
        std::sort(edges.begin(), edges.end());
        if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
            throw PreconditionError("hypergraph: duplicate edge");
        g.blocks_ = std::move(blocks);
        g.edges_ = std::move(edges);
        g.ambient_ = ambient;
        return g;
    }

    static KUniformHypergraph complete(int k, std::vector<std::vector<int>> blocks) {
        std::vector<std::vector<int>> edges;
        std::vector<int> cur(static_cast<std::size_t>(k));
        std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
        long long total = 1;
        for (auto& b : blocks) total *= static_cast<long long>(b.size());
        edges.reserve(static_cast<std::size_t>(total));
        while (true) {
            for (int i = 0; i < k; ++i)
                cur[static_cast<std::size_t>(i)] =
                    blocks[static_cast<std::size_t>(i)][idx[static_cast<std::size_t>(i)]];
            edges.push_back(cur);
            int i = k - 1;
            while (i >= 0 && ++idx[static_cast<std::size_t>(i)] ==
                                 blocks[static_cast<std::size_t>(i)].size()) {
                idx[static_cast<std::size_t>(i)] = 0;
                --i;
            }
            if (i < 0) break;
        }
        return make(k, std::move(blocks), std::move(edges));
    }

    int uniformity() const { return k_; }
    int ambient_size() const { return ambient_; }
    const std::vector<std::vector<int>>& blocks() const { return blocks_; }
    const std::vector<int>& block(int i) const { return blocks_[static_cast<std::size_t>(i)]; }
    const std::vector<std::vector<int>>& edges() const { return edges_; }
    long long edge_count() const { return static_cast<long long>(edges_.size()); }
    int block_of(int v) const {
        return v >= 0 && v < ambient_ ? block_of_[static_cast<std::size_t>(v)] : -1;
    }

    // e(U_1,...,U_k) for masks U_i (U_i need not be inside block i here; the
    // density wrapper validates that separately).
    long long edges_in(const std::vector<VertexMask>& masks) const {
        long long e = 0;
        for (const auto& edge : edges_) {
            bool inside = true;
            for (int i = 0; i < k_ && inside; ++i)
                inside = masks[static_cast<std::size_t>(i)].contains(
                    edge[static_cast<std::size_t>(i)]);
            e += inside;
        }
        return e;
    }

private:
    int k_ = 0;
    int ambient_ = 0;
    std::vector<std::vector<int>> blocks_;
    std::vector<int> block_of_;
    std::vector<std::vector<int>> edges_;
};

inline Density hyperdensity(const KUniformHypergraph& g,
                            const std::vector<std::vector<int>>& subsets) {
    if (static_cast<int>(subsets.size()) != g.uniformity())
        throw PreconditionError("hyperdensity: expected one subset per block");
    std::vector<VertexMask> masks;
    BigInt total = 1;
    for (int i = 0; i < g.uniformity(); ++i) {
        const auto& s = subsets[static_cast<std::size_t>(i)];
        if (s.empty()) throw PreconditionError("hyperdensity: empty subset");
        for (int v : s)
            if (g.block_of(v) != i)
                throw PreconditionError("hyperdensity: subset outside its block");
        masks.push_back(VertexMask::of(g.ambient_size(), s));
        total *= BigInt(s.size());
    }
    Density d;
    d.pairs = g.edges_in(masks);
    d.total = total;
    return d;
}

// The bipartite graph between disjoint A and B, viewed as a 2-uniform
// 2-partite hypergraph (edges are the G-edges with one end in each side).
inline KUniformHypergraph bipartite_hypergraph(const Graph& g, const std::vector<int>& a,
                                               const std::vector<int>& b) {
    std::vector<std::vector<int>> edges;
    for (int u : a)
        for (int v : b)
            if (g.adjacent(u, v)) edges.push_back({u, v});
    return KUniformHypergraph::make(2, {a, b}, std::move(edges));
}

}  // namespace removal_lab
