// Small labeled patterns H on vertex set {0,...,h-1}.
#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "removal_lab/errors.hpp"

namespace removal_lab {

class Pattern {
public:
    Pattern() = default;

    // User-facing patterns must be simple with h >= 2 and at least one edge;
    // edgeless intermediates (induced prefixes) are allowed when
    // require_edge is false.
    static Pattern from_edges(int h, std::vector<std::pair<int, int>> edges,
                              bool require_edge = true) {
        if (h < 1 || h > 30) throw PreconditionError("pattern: vertex count out of range");
        if (require_edge && h < 2) throw PreconditionError("pattern: need at least 2 vertices");
        Pattern p;
        p.h_ = h;
        p.adj_.assign(static_cast<std::size_t>(h), 0);
        for (auto& [u, v] : edges) {
            if (u < 0 || u >= h || v < 0 || v >= h)
                throw PreconditionError("pattern: vertex out of range");
            if (u == v) throw PreconditionError("pattern: self-loop");
            if (u > v) std::swap(u, v);
            if (p.adjacent(u, v)) throw PreconditionError("pattern: duplicate edge");
            p.adj_[static_cast<std::size_t>(u)] |= (1u << v);
            p.adj_[static_cast<std::size_t>(v)] |= (1u << u);
        }
        if (require_edge && edges.empty())
            throw PreconditionError("pattern: needs at least one edge");
        std::sort(edges.begin(), edges.end());
        p.edges_ = std::move(edges);
        return p;
    }

    // Presets: triangle, k4, c4, c5, edge, path<k> (path on k vertices).
    static Pattern preset(const std::string& name) {
        std::string s = name;
        std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
            return static_cast<char>(std::tolower(c));
        });
        if (s == "triangle" || s == "k3") return from_edges(3, {{0, 1}, {1, 2}, {0, 2}});
        if (s == "k4")
            return from_edges(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
        if (s == "c4") return from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
        if (s == "c5") return from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}});
        if (s == "edge" || s == "k2") return from_edges(2, {{0, 1}});
        if (s.rfind("path", 0) == 0) {
            int k = 0;
            try {
                k = std::stoi(s.substr(4));
            } catch (...) {
                throw ParseError("pattern: bad path preset '" + name + "'");
            }
            if (k < 2 || k > 30) throw ParseError("pattern: path length out of range");
            std::vector<std::pair<int, int>> e;
            for (int i = 0; i + 1 < k; ++i) e.emplace_back(i, i + 1);
            return from_edges(k, std::move(e));
        }
        throw ParseError("pattern: unknown preset '" + name + "'");
    }

    int vertex_count() const { return h_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    bool adjacent(int u, int v) const {
        return (adj_[static_cast<std::size_t>(u)] >> v) & 1u;
    }
    std::uint32_t neighbor_bits(int v) const { return adj_[static_cast<std::size_t>(v)]; }

    int degree(int v) const { return __builtin_popcount(adj_[static_cast<std::size_t>(v)]); }

    std::vector<int> neighbors(int v) const {
        std::vector<int> out;
        for (int u = 0; u < h_; ++u)
            if (adjacent(v, u)) out.push_back(u);
        return out;
    }

    // Induced subpattern on {0,...,k-1}; may be edgeless.
    Pattern induced_prefix(int k) const {
        std::vector<std::pair<int, int>> e;
        for (auto [u, v] : edges_)
            if (u < k && v < k) e.emplace_back(u, v);
        return from_edges(k, std::move(e), /*require_edge=*/false);
    }

    // Static enumeration order: degree-descending, ties by index, then
    // reordered so each vertex after the first touches an earlier one when
    // the pattern is connected (keeps the backtracking pruned).
    std::vector<int> enumeration_order() const {
        std::vector<int> order(static_cast<std::size_t>(h_));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return degree(a) > degree(b); });
        std::vector<int> out;
        std::vector<bool> placed(static_cast<std::size_t>(h_), false);
        out.reserve(static_cast<std::size_t>(h_));
        while (static_cast<int>(out.size()) < h_) {
            int pick = -1;
            for (int cand : order) {
                if (placed[static_cast<std::size_t>(cand)]) continue;
                bool connected = out.empty();
                for (int prev : out)
                    if (adjacent(cand, prev)) connected = true;
                if (connected) {
                    pick = cand;
                    break;
                }
            }
            if (pick == -1) {
                for (int cand : order)
                    if (!placed[static_cast<std::size_t>(cand)]) {
                        pick = cand;
                        break;
                    }
            }
            placed[static_cast<std::size_t>(pick)] = true;
            out.push_back(pick);
        }
        return out;
    }

    // |Aut(H)|: adjacency-preserving permutations of the vertex set.
    long long automorphism_count() const {
        std::vector<int> perm(static_cast<std::size_t>(h_), -1);
        std::vector<bool> used(static_cast<std::size_t>(h_), false);
        long long count = 0;
        aut_rec(0, perm, used, count);
        return count;
    }

private:
    void aut_rec(int pos, std::vector<int>& perm, std::vector<bool>& used,
                 long long& count) const {
        if (pos == h_) {
            ++count;
            return;
        }
        for (int img = 0; img < h_; ++img) {
            if (used[static_cast<std::size_t>(img)]) continue;
            if (degree(pos) != degree(img)) continue;
            bool ok = true;
            for (int prev = 0; prev < pos && ok; ++prev)
                ok = adjacent(pos, prev) == adjacent(img, perm[static_cast<std::size_t>(prev)]);
            if (!ok) continue;
            perm[static_cast<std::size_t>(pos)] = img;
            used[static_cast<std::size_t>(img)] = true;
            aut_rec(pos + 1, perm, used, count);
            used[static_cast<std::size_t>(img)] = false;
        }
    }

    int h_ = 0;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::uint32_t> adj_;
};

}  // namespace removal_lab
