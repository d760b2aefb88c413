// Simple undirected graphs on dense vertex indices, with the exact density
// primitive d(A,B) = e(A,B)/(|A||B|) over ordered pairs.
#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "removal_lab/errors.hpp"
#include "removal_lab/rational.hpp"

namespace removal_lab {

// Fixed-width bitset over [0, n): membership mask for vertex sets.
class VertexMask {
public:
    VertexMask() = default;
    explicit VertexMask(int n) : n_(n), words_((static_cast<std::size_t>(n) + 63) / 64, 0) {}

    static VertexMask of(int n, const std::vector<int>& verts) {
        VertexMask m(n);
        for (int v : verts) m.add(v);
        return m;
    }

    void add(int v) {
        words_[static_cast<std::size_t>(v) >> 6] |= (std::uint64_t{1} << (v & 63));
        ++count_;
    }
    bool contains(int v) const {
        return (words_[static_cast<std::size_t>(v) >> 6] >> (v & 63)) & 1u;
    }
    int count() const { return count_; }
    int universe() const { return n_; }
    const std::vector<std::uint64_t>& words() const { return words_; }

private:
    int n_ = 0;
    std::vector<std::uint64_t> words_;
    int count_ = 0;
};

class Graph {
public:
    Graph() = default;

    static Graph from_edges(int n, std::vector<std::pair<int, int>> edges) {
        if (n < 0) throw PreconditionError("graph: negative vertex count");
        Graph g;
        g.n_ = n;
        g.adj_.assign(static_cast<std::size_t>(n),
                      std::vector<std::uint64_t>((static_cast<std::size_t>(n) + 63) / 64, 0));
        for (auto& [u, v] : edges) {
            if (u < 0 || u >= n || v < 0 || v >= n)
                throw PreconditionError("graph: vertex out of range");
            if (u == v) throw PreconditionError("graph: self-loop");
            if (u > v) std::swap(u, v);
            if (g.adjacent(u, v)) throw PreconditionError("graph: duplicate edge");
            g.set_edge(u, v);
        }
        std::sort(edges.begin(), edges.end());
        g.edges_ = std::move(edges);
        return g;
    }

    int vertex_count() const { return n_; }
    long long edge_count() const { return static_cast<long long>(edges_.size()); }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }

    bool adjacent(int u, int v) const {
        return (adj_[static_cast<std::size_t>(u)][static_cast<std::size_t>(v) >> 6] >>
                (v & 63)) &
               1u;
    }

    int degree(int v) const {
        int d = 0;
        for (std::uint64_t w : adj_[static_cast<std::size_t>(v)])
            d += __builtin_popcountll(w);
        return d;
    }

    std::vector<int> neighbors(int v) const {
        std::vector<int> out;
        for (int u = 0; u < n_; ++u)
            if (adjacent(v, u)) out.push_back(u);
        return out;
    }

    // Number of neighbors of v inside the mask.
    int degree_into(int v, const VertexMask& mask) const {
        const auto& row = adj_[static_cast<std::size_t>(v)];
        long long d = 0;
        for (std::size_t i = 0; i < row.size(); ++i)
            d += __builtin_popcountll(row[i] & mask.words()[i]);
        return static_cast<int>(d);
    }

    Graph without_edges(const std::vector<std::pair<int, int>>& removed) const {
        Graph g = *this;
        for (auto [u, v] : removed) {
            if (u > v) std::swap(u, v);
            if (!g.adjacent(u, v)) throw PreconditionError("without_edges: edge not present");
            g.clear_edge(u, v);
        }
        std::vector<std::pair<int, int>> kept;
        kept.reserve(edges_.size());
        for (auto e : edges_)
            if (g.adjacent(e.first, e.second)) kept.push_back(e);
        g.edges_ = std::move(kept);
        return g;
    }

private:
    void set_edge(int u, int v) {
        adj_[static_cast<std::size_t>(u)][static_cast<std::size_t>(v) >> 6] |=
            (std::uint64_t{1} << (v & 63));
        adj_[static_cast<std::size_t>(v)][static_cast<std::size_t>(u) >> 6] |=
            (std::uint64_t{1} << (u & 63));
    }
    void clear_edge(int u, int v) {
        adj_[static_cast<std::size_t>(u)][static_cast<std::size_t>(v) >> 6] &=
            ~(std::uint64_t{1} << (v & 63));
        adj_[static_cast<std::size_t>(v)][static_cast<std::size_t>(u) >> 6] &=
            ~(std::uint64_t{1} << (u & 63));
    }

    int n_ = 0;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<std::uint64_t>> adj_;
};

// Exact edge density: numerator counts ordered pairs (x,y) in A x B that are
// edges. A and B may overlap; diagonal pairs are never edges, and an edge with
// both endpoints in the intersection is counted in both orientations, so
// d(V,V) = 2|E|/n^2.
struct Density {
    long long pairs = 0;
    BigInt total = 0;
    Rat value() const { return total == 0 ? Rat(0) : Rat(BigInt(pairs), total); }
};

inline long long ordered_edge_pairs(const Graph& g, const std::vector<int>& a,
                                    const VertexMask& b_mask) {
    long long e = 0;
    for (int v : a) e += g.degree_into(v, b_mask);
    return e;
}

inline Density density(const Graph& g, const std::vector<int>& a, const std::vector<int>& b) {
    if (a.empty() || b.empty()) throw PreconditionError("density: empty vertex set");
    for (int v : a)
        if (v < 0 || v >= g.vertex_count()) throw PreconditionError("density: vertex out of range");
    for (int v : b)
        if (v < 0 || v >= g.vertex_count()) throw PreconditionError("density: vertex out of range");
    VertexMask bm = VertexMask::of(g.vertex_count(), b);
    Density d;
    d.pairs = ordered_edge_pairs(g, a, bm);
    d.total = BigInt(a.size()) * BigInt(b.size());
    return d;
}

// Text format: first line "n m", then m lines "u v" (0-based, no loops,
// no duplicates). Each malformed input gets its own diagnostic.
inline Graph parse_edge_list(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("edge list: missing header line");
    std::istringstream header(line);
    long long n = -1, m = -1;
    if (!(header >> n >> m) || n < 0 || m < 0) {
        std::string extra;
        throw ParseError("edge list: malformed header '" + line + "' (expected 'n m')");
    }
    {
        std::string extra;
        if (header >> extra) throw ParseError("edge list: trailing tokens in header");
    }
    std::vector<std::pair<int, int>> edges;
    edges.reserve(static_cast<std::size_t>(m));
    for (long long i = 0; i < m; ++i) {
        if (!std::getline(in, line))
            throw ParseError("edge list: expected " + std::to_string(m) + " edges, got " +
                             std::to_string(i));
        std::istringstream es(line);
        long long u, v;
        if (!(es >> u >> v))
            throw ParseError("edge list: malformed line " + std::to_string(i + 2) + ": '" + line +
                             "'");
        std::string extra;
        if (es >> extra)
            throw ParseError("edge list: trailing tokens on line " + std::to_string(i + 2));
        if (u < 0 || u >= n || v < 0 || v >= n)
            throw ParseError("edge list: vertex out of range on line " + std::to_string(i + 2));
        if (u == v) throw ParseError("edge list: self-loop on line " + std::to_string(i + 2));
        edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
    }
    while (std::getline(in, line)) {
        std::istringstream rest(line);
        std::string tok;
        if (rest >> tok) throw ParseError("edge list: unexpected content after last edge");
    }
    try {
        return Graph::from_edges(static_cast<int>(n), std::move(edges));
    } catch (const PreconditionError& e) {
        throw ParseError(std::string("edge list: ") + e.what());
    }
}

inline Graph parse_edge_list(const std::string& text) {
    std::istringstream in(text);
    return parse_edge_list(in);
}

inline std::string format_edge_list(const Graph& g) {
    std::ostringstream out;
    out << g.vertex_count() << ' ' << g.edge_count() << '\n';
    for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
    return out.str();
}

}  // namespace removal_lab
