// Edge-disjoint H-packings (greedy maximal / exact maximum) and the exact
// H-removal distance with a deletion certificate.
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "removal_lab/count.hpp"
#include "removal_lab/errors.hpp"
#include "removal_lab/graph.hpp"
#include "removal_lab/pattern.hpp"
#include "removal_lab/rng.hpp"

namespace removal_lab {

struct Packing {
    // Each copy is a vertex tuple indexed by pattern vertex.
    std::vector<std::vector<int>> copies;

    int size() const { return static_cast<int>(copies.size()); }
};

inline void validate_packing(const Graph& g, const Pattern& h, const Packing& p) {
    std::set<std::pair<int, int>> used;
    for (const auto& image : p.copies) {
        if (!is_labeled_copy(g, h, image))
            throw PreconditionError("packing: tuple is not a copy of the pattern");
        for (auto e : copy_edges(h, image))
            if (!used.insert(e).second)
                throw PreconditionError("packing: copies share an edge");
    }
}

// Union subgraph of the packed copies; e(G') = e(H) * |packing|.
inline Graph packing_union(const Graph& g, const Pattern& h, const Packing& p) {
    validate_packing(g, h, p);
    std::vector<std::pair<int, int>> edges;
    for (const auto& image : p.copies)
        for (auto e : copy_edges(h, image)) edges.push_back(e);
    return Graph::from_edges(g.vertex_count(), std::move(edges));
}

// Greedy maximal packing: take the first copy in enumeration order, restart
// the enumeration against the residual graph, repeat. The seed permutes the
// vertex order tried at every backtracking level.
inline Packing packing_greedy(const Graph& g, const Pattern& h, std::uint64_t seed) {
    std::vector<int> order(static_cast<std::size_t>(g.vertex_count()));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, 0x9ac4));
    rng.shuffle(order);

    Packing packing;
    Graph residual = g;
    while (true) {
        std::optional<std::vector<int>> found;
        enumerate_labeled_copies(
            residual, h,
            [&](const std::vector<int>& image) {
                found = image;
                return false;
            },
            &order);
        if (!found) break;
        packing.copies.push_back(*found);
        residual = residual.without_edges(copy_edges(h, *found));
    }
    return packing;
}

namespace detail {

struct CopyIndex {
    std::vector<std::vector<int>> representatives;       // one tuple per distinct copy
    std::vector<std::vector<int>> copy_edge_ids;         // edge ids per copy
    std::vector<std::vector<int>> edge_copy_ids;         // copy ids per edge
    std::vector<std::pair<int, int>> edge_by_id;
};

inline CopyIndex build_copy_index(const Graph& g, const Pattern& h, long long copy_budget) {
    CopyIndex index;
    std::map<std::pair<int, int>, int> edge_id;
    for (auto e : g.edges()) {
        edge_id[e] = static_cast<int>(index.edge_by_id.size());
        index.edge_by_id.push_back(e);
    }
    index.edge_copy_ids.assign(index.edge_by_id.size(), {});
    std::set<std::vector<std::pair<int, int>>> seen;
    bool over_budget = false;
    enumerate_labeled_copies(g, h, [&](const std::vector<int>& image) {
        auto edges = copy_edges(h, image);
        if (!seen.insert(edges).second) return true;
        if (static_cast<long long>(seen.size()) > copy_budget) {
            over_budget = true;
            return false;
        }
        int cid = static_cast<int>(index.representatives.size());
        index.representatives.push_back(image);
        std::vector<int> ids;
        ids.reserve(edges.size());
        for (auto e : edges) ids.push_back(edge_id.at(e));
        for (int id : ids) index.edge_copy_ids[static_cast<std::size_t>(id)].push_back(cid);
        index.copy_edge_ids.push_back(std::move(ids));
        return true;
    });
    if (over_budget) throw BudgetError("packing: copy budget exceeded in exact mode");
    return index;
}

}  // namespace detail

// Exact maximum packing by branch and bound over the copy list: at each node
// the lowest-indexed edge still coverable is either used by one of its copies
// or wasted.
inline Packing packing_exact(const Graph& g, const Pattern& h, long long copy_budget = 200000,
                             long long node_budget = 50'000'000) {
    auto index = detail::build_copy_index(g, h, copy_budget);
    int num_edges = static_cast<int>(index.edge_by_id.size());
    int num_copies = static_cast<int>(index.representatives.size());
    int eh = h.edge_count();

    std::vector<bool> edge_blocked(static_cast<std::size_t>(num_edges), false);
    std::vector<int> chosen;
    std::vector<int> best;
    long long nodes = 0;

    auto copy_available = [&](int c) {
        for (int e : index.copy_edge_ids[static_cast<std::size_t>(c)])
            if (edge_blocked[static_cast<std::size_t>(e)]) return false;
        return true;
    };

    std::function<void()> rec = [&]() {
        if (++nodes > node_budget) throw BudgetError("packing: node budget exceeded in exact mode");
        int free_edges = 0;
        for (int e = 0; e < num_edges; ++e)
            if (!edge_blocked[static_cast<std::size_t>(e)]) ++free_edges;
        long long bound = static_cast<long long>(chosen.size()) + free_edges / eh;
        if (bound <= static_cast<long long>(best.size())) return;

        int branch_edge = -1;
        for (int e = 0; e < num_edges && branch_edge == -1; ++e) {
            if (edge_blocked[static_cast<std::size_t>(e)]) continue;
            for (int c : index.edge_copy_ids[static_cast<std::size_t>(e)])
                if (copy_available(c)) {
                    branch_edge = e;
                    break;
                }
        }
        if (branch_edge == -1) {
            if (chosen.size() > best.size()) best = chosen;
            return;
        }
        for (int c : index.edge_copy_ids[static_cast<std::size_t>(branch_edge)]) {
            if (!copy_available(c)) continue;
            for (int e : index.copy_edge_ids[static_cast<std::size_t>(c)])
                edge_blocked[static_cast<std::size_t>(e)] = true;
            chosen.push_back(c);
            rec();
            chosen.pop_back();
            for (int e : index.copy_edge_ids[static_cast<std::size_t>(c)])
                edge_blocked[static_cast<std::size_t>(e)] = false;
        }
        edge_blocked[static_cast<std::size_t>(branch_edge)] = true;
        rec();
        edge_blocked[static_cast<std::size_t>(branch_edge)] = false;
    };
    if (num_copies > 0) rec();

    Packing packing;
    for (int c : best) packing.copies.push_back(index.representatives[static_cast<std::size_t>(c)]);
    return packing;
}

struct RemovalResult {
    long long distance = 0;
    std::vector<std::pair<int, int>> deleted;  // certificate
};

// Minimum number of edge deletions after which G has no copy of H.
// Branch and bound: every copy forces one of its edges out; a greedy packing
// of the residual lower-bounds the remaining deletions.
inline RemovalResult removal_distance_exact(const Graph& g, const Pattern& h,
                                            long long edge_budget = 64,
                                            long long node_budget = 20'000'000) {
    if (g.edge_count() > edge_budget)
        throw BudgetError("removal distance: edge budget exceeded");

    auto first_copy = [&](const Graph& cur) -> std::optional<std::vector<int>> {
        std::optional<std::vector<int>> found;
        enumerate_labeled_copies(cur, h, [&](const std::vector<int>& image) {
            found = image;
            return false;
        });
        return found;
    };

    auto greedy_packing_size = [&](const Graph& cur) {
        long long size = 0;
        Graph residual = cur;
        while (auto image = first_copy(residual)) {
            ++size;
            residual = residual.without_edges(copy_edges(h, *image));
        }
        return size;
    };

    // Incumbent: repeatedly delete the edge lying in the most copies.
    RemovalResult best;
    {
        Graph cur = g;
        std::vector<std::pair<int, int>> deleted;
        while (true) {
            std::map<std::pair<int, int>, long long> edge_hits;
            enumerate_labeled_copies(cur, h, [&](const std::vector<int>& image) {
                for (auto e : copy_edges(h, image)) ++edge_hits[e];
                return true;
            });
            if (edge_hits.empty()) break;
            auto it = std::max_element(edge_hits.begin(), edge_hits.end(),
                                       [](const auto& a, const auto& b) {
                                           return a.second < b.second;
                                       });
            deleted.push_back(it->first);
            cur = cur.without_edges({it->first});
        }
        best.distance = static_cast<long long>(deleted.size());
        best.deleted = std::move(deleted);
    }

    long long nodes = 0;
    std::vector<std::pair<int, int>> current;
    std::function<void(const Graph&)> rec = [&](const Graph& cur) {
        if (++nodes > node_budget)
            throw BudgetError("removal distance: node budget exceeded");
        long long lower = greedy_packing_size(cur);
        if (static_cast<long long>(current.size()) + lower >= best.distance) return;
        auto image = first_copy(cur);
        if (!image) {
            best.distance = static_cast<long long>(current.size());
            best.deleted = current;
            return;
        }
        for (auto e : copy_edges(h, *image)) {
            current.push_back(e);
            rec(cur.without_edges({e}));
            current.pop_back();
        }
    };
    rec(g);
    return best;
}

}  // namespace removal_lab
