// The entropy functional f(x) = x ln x, the mean entropy / mean square
// densities of a partition, and the Jensen-type defect inequalities.
#pragma once

#include <cmath>
#include <functional>
#include <set>
#include <vector>

#include "removal_lab/errors.hpp"
#include "removal_lab/graph.hpp"
#include "removal_lab/partition.hpp"
#include "removal_lab/rational.hpp"

namespace removal_lab {

inline constexpr double kEntropyTolerance = 1e-9;

inline double f_entropy(double x) {
    if (x < 0) throw PreconditionError("f_entropy: negative input");
    if (x == 0) return 0.0;
    return x * std::log(x);
}

inline double f_entropy(const Rat& x) { return f_entropy(rat_to_double(x)); }

// Nonnegative values with exact rational weights summing to 1.
struct WeightedValues {
    std::vector<std::pair<Rat, Rat>> items;  // (weight, value)

    static WeightedValues make(std::vector<std::pair<Rat, Rat>> items) {
        Rat sum(0);
        for (const auto& [w, x] : items) {
            if (w < 0) throw PreconditionError("weighted values: negative weight");
            if (x < 0) throw PreconditionError("weighted values: negative value");
            sum += w;
        }
        if (sum != 1) throw PreconditionError("weighted values: weights must sum to 1");
        return WeightedValues{std::move(items)};
    }

    int size() const { return static_cast<int>(items.size()); }

    Rat mean() const {
        Rat a(0);
        for (const auto& [w, x] : items) a += w * x;
        return a;
    }
};

// Sum over all ordered part pairs (including i = j) of p_i p_j f(d(V_i,V_j)).
// Densities are exact until the final f evaluation.
inline double mean_entropy_density(const Graph& g, const Partition& p) {
    if (p.vertex_count() != g.vertex_count())
        throw PreconditionError("mean_entropy_density: partition of a different vertex set");
    int k = p.part_count();
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            Density d = density(g, p.part(i), p.part(j));
            if (d.pairs == 0) continue;  // f(0) = 0
            double weight = rat_to_double(p.weight(i) * p.weight(j));
            sum += weight * f_entropy(d.value());
        }
    }
    return sum;
}

// The classical energy functional, kept for comparison traces. The sum is
// exact rational; only the returned value is a double.
inline double mean_square_density(const Graph& g, const Partition& p) {
    if (p.vertex_count() != g.vertex_count())
        throw PreconditionError("mean_square_density: partition of a different vertex set");
    int k = p.part_count();
    Rat sum(0);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            Density d = density(g, p.part(i), p.part(j));
            if (d.pairs == 0) continue;
            Rat dv = d.value();
            sum += p.weight(i) * p.weight(j) * dv * dv;
        }
    }
    return rat_to_double(sum);
}

// Normalized pair functional f(A,B) = (|A||B|/|V|^2) f(d(A,B)).
inline double pair_functional(const Graph& g, const std::vector<int>& a,
                              const std::vector<int>& b,
                              const std::function<double(const Rat&)>& f) {
    Density d = density(g, a, b);
    double weight = static_cast<double>(a.size()) * static_cast<double>(b.size()) /
                    (static_cast<double>(g.vertex_count()) * static_cast<double>(g.vertex_count()));
    return weight * f(d.value());
}

// f(partition of A, partition of B) = sum of pair functionals over blocks.
inline double partition_pair_functional(const Graph& g, const std::vector<std::vector<int>>& pa,
                                        const std::vector<std::vector<int>>& pb,
                                        const std::function<double(const Rat&)>& f) {
    double sum = 0.0;
    for (const auto& a : pa)
        for (const auto& b : pb) sum += pair_functional(g, a, b, f);
    return sum;
}

struct BoundCheck {
    double lhs = 0.0;
    double bound = 0.0;
    bool holds = false;
};

// Jensen split: sum eps_i f(x_i) >= c f(u) + (1-c) f(v) with c, u, v exact.
inline BoundCheck jensen_split_lower_bound(const WeightedValues& w, const std::set<int>& index_set,
                                           const std::function<double(const Rat&)>& f = [](const Rat& x) {
                                               return f_entropy(x);
                                           }) {
    Rat c(0), num_u(0), num_v(0);
    for (int i = 0; i < w.size(); ++i) {
        const auto& [wi, xi] = w.items[static_cast<std::size_t>(i)];
        if (index_set.count(i)) {
            c += wi;
            num_u += wi * xi;
        } else {
            num_v += wi * xi;
        }
    }
    if (c == 0 || c == 1)
        throw PreconditionError("jensen split: index set weight must lie strictly in (0,1)");
    Rat u = num_u / c;
    Rat v = num_v / (Rat(1) - c);
    BoundCheck out;
    out.bound = rat_to_double(c) * f(u) + rat_to_double(Rat(1) - c) * f(v);
    out.lhs = 0.0;
    for (int i = 0; i < w.size(); ++i) {
        const auto& [wi, xi] = w.items[static_cast<std::size_t>(i)];
        out.lhs += rat_to_double(wi) * f(xi);
    }
    out.holds = out.lhs >= out.bound - kEntropyTolerance;
    return out;
}

// Defect inequality for f(x) = x ln x:
// sum eps_i f(x_i) >= f(a) + (1 - beta + f(beta)) c a, given x_i <= beta*a
// on the index set. The precondition is checked exactly.
inline BoundCheck defect_lower_bound(const WeightedValues& w, const Rat& beta,
                                     const std::set<int>& index_set) {
    if (beta <= 0 || beta >= 1)
        throw PreconditionError("defect bound: beta must lie in (0,1)");
    Rat a = w.mean();
    Rat c(0);
    for (int i : index_set) {
        if (i < 0 || i >= w.size()) throw PreconditionError("defect bound: index out of range");
        const auto& [wi, xi] = w.items[static_cast<std::size_t>(i)];
        if (xi > beta * a)
            throw PreconditionError("defect bound: x_i exceeds beta * a on the index set");
        c += wi;
    }
    BoundCheck out;
    out.lhs = 0.0;
    for (const auto& [wi, xi] : w.items) out.lhs += rat_to_double(wi) * f_entropy(xi);
    out.bound = f_entropy(a) +
                (1.0 - rat_to_double(beta) + f_entropy(beta)) * rat_to_double(c) * rat_to_double(a);
    out.holds = out.lhs >= out.bound - kEntropyTolerance;
    return out;
}

struct GainCheck {
    double refined = 0.0;    // f(partition of A, partition of B)
    double coarse = 0.0;     // f(A, B)
    double gain_term = 0.0;  // (c/2) e(A,B) / |V|^2
    bool holds = false;
};

// Entropy gain of a verified (alpha, c, t)-shattering of a pair with
// d(A,B) >= 10*alpha:  f(partA, partB) >= f(A,B) + (c/2) e(A,B)/|V|^2.
inline GainCheck shattering_gain_bound(const Graph& g, const std::vector<int>& a,
                                       const std::vector<int>& b, const SetPartition& pa,
                                       const SetPartition& pb, const Rat& alpha, const Rat& c) {
    pa.validate(a);
    pb.validate(b);
    Density dab = density(g, a, b);
    if (dab.value() < Rat(10) * alpha)
        throw PreconditionError("shattering gain: requires d(A,B) >= 10*alpha");
    // The claimed c must be met by the low-density mass (exact check).
    BigInt mass = 0;
    for (const auto& ap : pa.parts)
        for (const auto& bp : pb.parts) {
            Density d = density(g, ap, bp);
            if (d.value() < alpha) mass += BigInt(ap.size()) * BigInt(bp.size());
        }
    if (Rat(mass, BigInt(a.size()) * BigInt(b.size())) < c)
        throw PreconditionError("shattering gain: pair is not (alpha,c,t)-shattered");

    auto f = [](const Rat& x) { return f_entropy(x); };
    GainCheck out;
    out.refined = partition_pair_functional(g, pa.parts, pb.parts, f);
    out.coarse = pair_functional(g, a, b, f);
    double n2 = static_cast<double>(g.vertex_count()) * static_cast<double>(g.vertex_count());
    out.gain_term = rat_to_double(c) / 2.0 * static_cast<double>(dab.pairs) / n2;
    out.holds = out.refined >= out.coarse + out.gain_term - kEntropyTolerance;
    return out;
}

}  // namespace removal_lab
