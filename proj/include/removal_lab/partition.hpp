// Vertex partitions with stable part indices, plus refinement checks.
#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "removal_lab/errors.hpp"
#include "removal_lab/rational.hpp"

namespace removal_lab {

// Partition of the full vertex set [0, n). Parts are nonempty, sorted
// internally, and keep the index they were constructed with.
class Partition {
public:
    Partition() = default;

    static Partition from_parts(int n, std::vector<std::vector<int>> parts) {
        Partition p;
        p.n_ = n;
        p.assignment_.assign(static_cast<std::size_t>(n), -1);
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (parts[i].empty()) throw PreconditionError("partition: empty part");
            std::sort(parts[i].begin(), parts[i].end());
            for (int v : parts[i]) {
                if (v < 0 || v >= n) throw PreconditionError("partition: vertex out of range");
                if (p.assignment_[static_cast<std::size_t>(v)] != -1)
                    throw PreconditionError("partition: overlapping parts");
                p.assignment_[static_cast<std::size_t>(v)] = static_cast<int>(i);
            }
        }
        for (int v = 0; v < n; ++v)
            if (p.assignment_[static_cast<std::size_t>(v)] == -1)
                throw PreconditionError("partition: vertex not covered");
        p.parts_ = std::move(parts);
        return p;
    }

    static Partition from_assignment(std::vector<int> assignment) {
        int n = static_cast<int>(assignment.size());
        int k = 0;
        for (int a : assignment) {
            if (a < 0) throw PreconditionError("partition: negative part index");
            k = std::max(k, a + 1);
        }
        std::vector<std::vector<int>> parts(static_cast<std::size_t>(k));
        for (int v = 0; v < n; ++v) parts[static_cast<std::size_t>(assignment[static_cast<std::size_t>(v)])].push_back(v);
        for (auto& part : parts)
            if (part.empty()) throw PreconditionError("partition: unused part index");
        return from_parts(n, std::move(parts));
    }

    static Partition trivial(int n) {
        std::vector<int> all(static_cast<std::size_t>(n));
        std::iota(all.begin(), all.end(), 0);
        return from_parts(n, {all});
    }

    static Partition singletons(int n) {
        std::vector<std::vector<int>> parts;
        parts.reserve(static_cast<std::size_t>(n));
        for (int v = 0; v < n; ++v) parts.push_back({v});
        return from_parts(n, std::move(parts));
    }

    int vertex_count() const { return n_; }
    int part_count() const { return static_cast<int>(parts_.size()); }
    const std::vector<std::vector<int>>& parts() const { return parts_; }
    const std::vector<int>& part(int i) const { return parts_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& assignment() const { return assignment_; }
    int part_of(int v) const { return assignment_[static_cast<std::size_t>(v)]; }

    // p_i = |V_i| / n, exact.
    Rat weight(int i) const { return Rat(BigInt(parts_[static_cast<std::size_t>(i)].size()), BigInt(n_)); }

private:
    int n_ = 0;
    std::vector<int> assignment_;
    std::vector<std::vector<int>> parts_;
};

// True iff every part of q lies inside a single part of p.
inline bool is_refinement(const Partition& p, const Partition& q) {
    if (p.vertex_count() != q.vertex_count())
        throw PreconditionError("is_refinement: mismatched vertex sets");
    for (const auto& part : q.parts()) {
        int owner = p.part_of(part.front());
        for (int v : part)
            if (p.part_of(v) != owner) return false;
    }
    return true;
}

// Partition of an arbitrary vertex subset (used by shatterings).
struct SetPartition {
    std::vector<std::vector<int>> parts;

    int part_count() const { return static_cast<int>(parts.size()); }

    // Validates that the parts are nonempty, disjoint and cover `ground`.
    void validate(const std::vector<int>& ground) const {
        std::vector<int> seen;
        for (const auto& part : parts) {
            if (part.empty()) throw PreconditionError("set partition: empty part");
            for (int v : part) seen.push_back(v);
        }
        std::vector<int> g = ground;
        std::sort(g.begin(), g.end());
        std::sort(seen.begin(), seen.end());
        if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
            throw PreconditionError("set partition: overlapping parts");
        if (seen != g) throw PreconditionError("set partition: does not cover the ground set");
    }
};

}  // namespace removal_lab
