// Exact copy counting by backtracking over H's vertices in a static
// degree-descending order with adjacency pruning.
#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <vector>

#include "removal_lab/errors.hpp"
#include "removal_lab/graph.hpp"
#include "removal_lab/pattern.hpp"

namespace removal_lab {

namespace detail {

// Visits every tuple (v_0,...,v_{h-1}) with v_i drawn from candidates(i),
// distinct when `injective`, and (v_i,v_j) an edge of G for every pattern
// edge (i,j). visit returns false to stop the enumeration.
inline bool enumerate_copies_impl(const Graph& g, const Pattern& h,
                                  const std::vector<int>& order,
                                  const std::vector<const std::vector<int>*>& candidates,
                                  bool injective,
                                  const std::function<bool(const std::vector<int>&)>& visit) {
    int hv = h.vertex_count();
    std::vector<int> image(static_cast<std::size_t>(hv), -1);
    std::vector<bool> used(static_cast<std::size_t>(g.vertex_count()), false);

    std::function<bool(int)> rec = [&](int pos) -> bool {
        if (pos == hv) return visit(image);
        int i = order[static_cast<std::size_t>(pos)];
        for (int v : *candidates[static_cast<std::size_t>(i)]) {
            if (injective && used[static_cast<std::size_t>(v)]) continue;
            bool ok = true;
            for (int p = 0; p < pos && ok; ++p) {
                int j = order[static_cast<std::size_t>(p)];
                if (h.adjacent(i, j) && !g.adjacent(v, image[static_cast<std::size_t>(j)]))
                    ok = false;
            }
            if (!ok) continue;
            image[static_cast<std::size_t>(i)] = v;
            used[static_cast<std::size_t>(v)] = true;
            bool cont = rec(pos + 1);
            used[static_cast<std::size_t>(v)] = false;
            image[static_cast<std::size_t>(i)] = -1;
            if (!cont) return false;
        }
        return true;
    };
    return rec(0);
}

}  // namespace detail

// Partite copies: tuples in V_0 x ... x V_{h-1} with the copy of pattern
// vertex i inside parts[i]. Parts must be pairwise disjoint (distinctness is
// then automatic).
inline void enumerate_partite_copies(const Graph& g, const Pattern& h,
                                     const std::vector<std::vector<int>>& parts,
                                     const std::function<bool(const std::vector<int>&)>& visit) {
    if (static_cast<int>(parts.size()) != h.vertex_count())
        throw PreconditionError("partite copies: expected one part per pattern vertex");
    std::vector<bool> seen(static_cast<std::size_t>(g.vertex_count()), false);
    for (const auto& part : parts)
        for (int v : part) {
            if (v < 0 || v >= g.vertex_count())
                throw PreconditionError("partite copies: vertex out of range");
            if (seen[static_cast<std::size_t>(v)])
                throw PreconditionError("partite copies: overlapping parts");
            seen[static_cast<std::size_t>(v)] = true;
        }
    std::vector<const std::vector<int>*> cand;
    cand.reserve(parts.size());
    for (const auto& part : parts) cand.push_back(&part);
    detail::enumerate_copies_impl(g, h, h.enumeration_order(), cand, /*injective=*/false, visit);
}

inline long long count_partite_copies(const Graph& g, const Pattern& h,
                                      const std::vector<std::vector<int>>& parts) {
    long long count = 0;
    enumerate_partite_copies(g, h, parts, [&](const std::vector<int>&) {
        ++count;
        return true;
    });
    return count;
}

// Labeled copies: injective adjacency-preserving maps [h] -> V(G).
inline void enumerate_labeled_copies(const Graph& g, const Pattern& h,
                                     const std::function<bool(const std::vector<int>&)>& visit,
                                     const std::vector<int>* vertex_order = nullptr) {
    std::vector<int> all;
    if (vertex_order != nullptr) {
        all = *vertex_order;
    } else {
        all.resize(static_cast<std::size_t>(g.vertex_count()));
        std::iota(all.begin(), all.end(), 0);
    }
    std::vector<const std::vector<int>*> cand(static_cast<std::size_t>(h.vertex_count()), &all);
    detail::enumerate_copies_impl(g, h, h.enumeration_order(), cand, /*injective=*/true, visit);
}

inline long long count_labeled_copies(const Graph& g, const Pattern& h) {
    long long count = 0;
    enumerate_labeled_copies(g, h, [&](const std::vector<int>&) {
        ++count;
        return true;
    });
    return count;
}

// Unlabeled copies = subgraphs of G isomorphic to H. Every such subgraph is
// the image of exactly |Aut(H)| labeled copies.
inline long long count_unlabeled_copies(const Graph& g, const Pattern& h) {
    long long labeled = count_labeled_copies(g, h);
    long long aut = h.automorphism_count();
    return labeled / aut;
}

// True iff `image` (indexed by pattern vertex) is a genuine labeled partite
// copy: distinct vertices and all pattern edges present.
inline bool is_labeled_copy(const Graph& g, const Pattern& h, const std::vector<int>& image) {
    if (static_cast<int>(image.size()) != h.vertex_count()) return false;
    for (int v : image)
        if (v < 0 || v >= g.vertex_count()) return false;
    std::set<int> distinct(image.begin(), image.end());
    if (static_cast<int>(distinct.size()) != h.vertex_count()) return false;
    for (auto [u, v] : h.edges())
        if (!g.adjacent(image[static_cast<std::size_t>(u)], image[static_cast<std::size_t>(v)]))
            return false;
    return true;
}

// Edge set of a copy, normalized (u < v, sorted).
inline std::vector<std::pair<int, int>> copy_edges(const Pattern& h,
                                                   const std::vector<int>& image) {
    std::vector<std::pair<int, int>> out;
    out.reserve(h.edges().size());
    for (auto [u, v] : h.edges()) {
        int a = image[static_cast<std::size_t>(u)];
        int b = image[static_cast<std::size_t>(v)];
        if (a > b) std::swap(a, b);
        out.emplace_back(a, b);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace removal_lab
