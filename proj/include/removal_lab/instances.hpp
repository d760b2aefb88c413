// Instance generators: random graphs, blow-ups, Behrend 3-AP-free sets and
// the tripartite lower-bound construction in which every edge lies in exactly
// one triangle.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "removal_lab/errors.hpp"
#include "removal_lab/graph.hpp"
#include "removal_lab/pattern.hpp"
#include "removal_lab/rng.hpp"

namespace removal_lab {

// Each pair independently an edge with exact probability p.
inline Graph gen_random(int n, const Rat& p, std::uint64_t seed) {
    if (p < 0 || p > 1) throw PreconditionError("gen_random: p must lie in [0,1]");
    std::vector<std::pair<int, int>> edges;
    Rng rng(derive_seed(seed, 0x6e4));
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (rng.bernoulli(p)) edges.emplace_back(u, v);
    return Graph::from_edges(n, std::move(edges));
}

// Blow-up F(a_1,...,a_k): vertex i becomes an independent set I_i of order
// a_i, complete bipartite between I_i and I_j iff (i,j) is an edge of F.
inline Graph gen_blowup(const Pattern& f, const std::vector<int>& sizes) {
    if (static_cast<int>(sizes.size()) != f.vertex_count())
        throw PreconditionError("blowup: expected one size per vertex");
    for (int a : sizes)
        if (a < 1) throw PreconditionError("blowup: sizes must be >= 1");
    std::vector<int> offset(sizes.size() + 1, 0);
    for (std::size_t i = 0; i < sizes.size(); ++i)
        offset[i + 1] = offset[i] + sizes[i];
    std::vector<std::pair<int, int>> edges;
    for (auto [u, v] : f.edges())
        for (int a = 0; a < sizes[static_cast<std::size_t>(u)]; ++a)
            for (int b = 0; b < sizes[static_cast<std::size_t>(v)]; ++b)
                edges.emplace_back(offset[static_cast<std::size_t>(u)] + a,
                                   offset[static_cast<std::size_t>(v)] + b);
    return Graph::from_edges(offset.back(), std::move(edges));
}

struct BehrendSet {
    long long range = 0;          // N
    std::vector<int> elements;    // subset of [1, N], sorted
};

// Brute-force 3-AP verifier: no x, x+s, x+2s with s >= 1.
inline bool is_three_ap_free(const std::vector<int>& elements) {
    std::set<int> s(elements.begin(), elements.end());
    for (int x : s)
        for (int y : s) {
            if (y <= x) continue;
            if (s.count(2 * y - x)) return false;
        }
    return true;
}

enum class BehrendStrategy { sphere, exhaustive };

namespace detail {

// Digit-sphere construction: integers whose base-b digits stay below b/2
// (so sums carry nowhere) grouped by the sum of squared digits; points on a
// sphere admit no midpoint, hence no 3-term progression.
inline std::vector<int> behrend_sphere(long long n, int base) {
    int half = (base - 1) / 2 + 1;  // digits in [0, half)
    std::map<long long, std::vector<int>> spheres;
    for (long long x = 0; x < n; ++x) {
        long long rest = x;
        long long norm = 0;
        bool ok = true;
        while (rest > 0) {
            long long digit = rest % base;
            if (digit >= half) {
                ok = false;
                break;
            }
            norm += digit * digit;
            rest /= base;
        }
        if (ok) spheres[norm].push_back(static_cast<int>(x + 1));  // shift into [1, N]
    }
    std::vector<int> best;
    for (auto& [norm, elems] : spheres)
        if (elems.size() > best.size()) best = elems;
    return best;
}

inline void behrend_exhaustive_rec(int next, long long n, std::vector<int>& current,
                                   std::vector<int>& best) {
    if (static_cast<long long>(current.size()) + (n - next + 1) <=
        static_cast<long long>(best.size()))
        return;
    if (next > n) {
        if (current.size() > best.size()) best = current;
        return;
    }
    // include `next` when it completes no progression with two chosen entries
    bool ok = true;
    std::set<int> chosen(current.begin(), current.end());
    for (int b : current) {
        int a = 2 * b - next;
        if (a != b && chosen.count(a)) {
            ok = false;
            break;
        }
    }
    if (ok) {
        current.push_back(next);
        behrend_exhaustive_rec(next + 1, n, current, best);
        current.pop_back();
    }
    behrend_exhaustive_rec(next + 1, n, current, best);
}

}  // namespace detail

// Verified 3-AP-free subset of [1, N]. The sphere strategy scans digit bases
// 2..10 and keeps the largest verified set; exhaustive returns a maximum set
// (N <= 30).
inline BehrendSet gen_behrend_set(long long n, BehrendStrategy strategy) {
    if (n < 1) throw PreconditionError("behrend: N must be >= 1");
    BehrendSet out;
    out.range = n;
    if (strategy == BehrendStrategy::exhaustive) {
        if (n > 30) throw BudgetError("behrend: exhaustive strategy limited to N <= 30");
        std::vector<int> current, best;
        detail::behrend_exhaustive_rec(1, n, current, best);
        out.elements = best;
    } else {
        std::vector<int> best;
        for (int base = 2; base <= 10; ++base) {
            auto cand = detail::behrend_sphere(n, base);
            if (cand.size() > best.size() && is_three_ap_free(cand)) best = cand;
        }
        out.elements = best;
    }
    if (!is_three_ap_free(out.elements))
        throw std::logic_error("behrend: generated set fails the 3-AP verifier");
    return out;
}

struct TripartiteInstance {
    Graph graph;
    std::vector<std::vector<int>> sides;  // X, Y, Z
    std::vector<int> progressions;        // the set S used
    long long planted_triangles = 0;      // m * |S|
};

// Vertices X = [m] (indices 0..m-1), Y = [2m], Z = [3m]; for each x in [m]
// and s in S the triangle (x, x+s, x+2s) across the sides. When S is
// 3-AP-free, every edge lies in exactly one triangle.
inline TripartiteInstance gen_ruzsa_szemeredi(int m, const BehrendSet& s) {
    if (m < 1) throw PreconditionError("rs: m must be >= 1");
    for (int v : s.elements)
        if (v < 1 || v > m)
            throw PreconditionError("rs: set must be contained in [1, m]");
    if (!is_three_ap_free(s.elements))
        throw PreconditionError("rs: set is not 3-AP-free");

    int n = 6 * m;
    auto x_id = [&](int x) { return x - 1; };            // x in [1, m]
    auto y_id = [&](int y) { return m + y - 1; };        // y in [1, 2m]
    auto z_id = [&](int z) { return 3 * m + z - 1; };    // z in [1, 3m]

    std::set<std::pair<int, int>> edges;
    long long planted = 0;
    for (int x = 1; x <= m; ++x) {
        for (int step : s.elements) {
            int y = x + step, z = x + 2 * step;
            edges.insert({x_id(x), y_id(y)});
            edges.insert({y_id(y), z_id(z)});
            edges.insert({x_id(x), z_id(z)});
            ++planted;
        }
    }
    TripartiteInstance inst{
        Graph::from_edges(n, {edges.begin(), edges.end()}),
        {},
        s.elements,
        planted};
    inst.sides.resize(3);
    for (int x = 1; x <= m; ++x) inst.sides[0].push_back(x_id(x));
    for (int y = 1; y <= 2 * m; ++y) inst.sides[1].push_back(y_id(y));
    for (int z = 1; z <= 3 * m; ++z) inst.sides[2].push_back(z_id(z));
    return inst;
}

struct PlantedInstance {
    Graph graph;
    std::vector<std::vector<int>> placements;  // vertex tuple per planted copy
};

// Base plus `copies` randomly placed vertex-disjoint copies of H.
inline PlantedInstance gen_planted(const Graph& base, const Pattern& h, int copies,
                                   std::uint64_t seed) {
    int n = base.vertex_count();
    int hv = h.vertex_count();
    if (static_cast<long long>(copies) * hv > n)
        throw PreconditionError("planted: not enough vertices for disjoint copies");
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, 0x91a));
    rng.shuffle(order);

    std::set<std::pair<int, int>> edges(base.edges().begin(), base.edges().end());
    PlantedInstance out{base, {}};
    for (int c = 0; c < copies; ++c) {
        std::vector<int> image(order.begin() + static_cast<std::ptrdiff_t>(c) * hv,
                               order.begin() + static_cast<std::ptrdiff_t>(c + 1) * hv);
        for (auto [u, v] : h.edges()) {
            int a = image[static_cast<std::size_t>(u)], b = image[static_cast<std::size_t>(v)];
            if (a > b) std::swap(a, b);
            edges.insert({a, b});
        }
        out.placements.push_back(std::move(image));
    }
    out.graph = Graph::from_edges(n, {edges.begin(), edges.end()});
    return out;
}

}  // namespace removal_lab
