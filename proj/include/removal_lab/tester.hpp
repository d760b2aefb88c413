// One-sided H-freeness property tester: t = ceil(2/delta) uniform h-tuples,
// reject on the first tuple that forms a labeled copy of H.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "removal_lab/count.hpp"
#include "removal_lab/errors.hpp"
#include "removal_lab/graph.hpp"
#include "removal_lab/parallel.hpp"
#include "removal_lab/pattern.hpp"
#include "removal_lab/rng.hpp"

namespace removal_lab {

struct TestVerdict {
    bool accept = true;
    std::vector<int> witness;  // a genuine labeled copy when rejecting
    long long samples_used = 0;
    Rat delta;
    std::uint64_t seed = 0;
};

inline long long tester_sample_count(const Rat& delta) {
    // t = ceil(2 / delta)
    Rat inv = Rat(2) / delta;
    BigInt num = rat_num(inv), den = rat_den(inv);
    BigInt q = num / den;
    if (q * den != num) q += 1;
    return q.convert_to<long long>();
}

// Tuples are sampled with replacement across tuples and coordinates; a tuple
// with repeated vertices never rejects. H-free graphs are always accepted.
inline TestVerdict test_h_freeness(const Graph& g, const Pattern& h, const Rat& delta,
                                   std::uint64_t seed) {
    if (delta <= 0 || delta > 1)
        throw PreconditionError("tester: delta must lie in (0, 1]");
    if (h.edge_count() == 0) throw PreconditionError("tester: pattern needs an edge");
    TestVerdict verdict;
    verdict.delta = delta;
    verdict.seed = seed;
    long long t = tester_sample_count(delta);
    int n = g.vertex_count();
    int hv = h.vertex_count();
    if (n == 0) {
        verdict.samples_used = t;
        return verdict;
    }
    for (long long s = 0; s < t; ++s) {
        Rng rng(derive_seed(seed, 0x7e57, static_cast<std::uint64_t>(s)));
        std::vector<int> tuple(static_cast<std::size_t>(hv));
        for (int i = 0; i < hv; ++i) tuple[static_cast<std::size_t>(i)] = rng.below_int(n);
        ++verdict.samples_used;
        if (is_labeled_copy(g, h, tuple)) {
            verdict.accept = false;
            verdict.witness = std::move(tuple);
            return verdict;
        }
    }
    return verdict;
}

struct RejectionEstimate {
    long long trials = 0;
    long long rejections = 0;
    double rate = 0.0;
    double half_width = 0.0;  // 95% normal-approximation
};

// Empirical rejection frequency over independent seeded runs; trials derive
// their generators from (seed, trial index), so parallel schedules agree.
inline RejectionEstimate estimate_rejection_rate(const Graph& g, const Pattern& h,
                                                 const Rat& delta, long long trials,
                                                 std::uint64_t seed) {
    if (trials < 1) throw PreconditionError("tester: trials must be >= 1");
    std::vector<long long> partial(static_cast<std::size_t>(max_threads() * 4), 0);
    parallel_ranges(trials, [&](long long begin, long long end, int range) {
        long long rejected = 0;
        for (long long trial = begin; trial < end; ++trial) {
            TestVerdict v =
                test_h_freeness(g, h, delta, derive_seed(seed, 0xba7c, static_cast<std::uint64_t>(trial)));
            if (!v.accept) ++rejected;
        }
        partial[static_cast<std::size_t>(range)] = rejected;
    });
    RejectionEstimate est;
    est.trials = trials;
    for (long long r : partial) est.rejections += r;
    est.rate = static_cast<double>(est.rejections) / static_cast<double>(trials);
    est.half_width =
        1.96 * std::sqrt(est.rate * (1.0 - est.rate) / static_cast<double>(trials));
    return est;
}

}  // namespace removal_lab
