// Seeded, schedule-independent randomness. Streams derive from (seed, tags...)
// so parallel consumers see the same values regardless of interleaving.
#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "removal_lab/rational.hpp"

namespace removal_lab {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    return splitmix64(seed ^ splitmix64(tag));
}

template <typename... Tags>
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag, Tags... rest) {
    return derive_seed(derive_seed(seed, tag), static_cast<std::uint64_t>(rest)...);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, n); n > 0. Rejection sampling keeps the stream
    // implementation-independent (std::uniform_int_distribution is not).
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) return 0;
        std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    int below_int(int n) { return static_cast<int>(below(static_cast<std::uint64_t>(n))); }

    // Exact Bernoulli(p) for rational p with denominator fitting in 64 bits.
    bool bernoulli(const Rat& p) {
        if (p <= 0) return false;
        if (p >= 1) return true;
        BigInt num = rat_num(p);
        BigInt den = rat_den(p);
        if (den <= BigInt(~std::uint64_t{0} >> 1)) {
            auto d = den.convert_to<std::uint64_t>();
            auto nu = num.convert_to<std::uint64_t>();
            return below(d) < nu;
        }
        return static_cast<double>(next() >> 11) * 0x1.0p-53 < rat_to_double(p);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Uniform k-subset of [0, n), returned sorted.
    std::vector<int> sample_subset(int n, int k) {
        std::vector<int> pool(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
        for (int i = 0; i < k; ++i) {
            int j = i + below_int(n - i);
            std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
        }
        pool.resize(static_cast<std::size_t>(k));
        std::sort(pool.begin(), pool.end());
        return pool;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace removal_lab
