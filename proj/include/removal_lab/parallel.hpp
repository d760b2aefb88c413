// Minimal deterministic parallelism: contiguous range splitting with
// per-range results merged in range order. REMOVAL_LAB_THREADS caps the pool.
#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace removal_lab {

inline int max_threads() {
    static int cached = [] {
        int hw = static_cast<int>(std::thread::hardware_concurrency());
        if (hw <= 0) hw = 1;
        if (const char* env = std::getenv("REMOVAL_LAB_THREADS")) {
            int v = std::atoi(env);
            if (v >= 1) hw = std::min(hw, v);
            if (v == 1) return 1;
        }
        return hw;
    }();
    return cached;
}

// Runs worker(begin, end, range_index) over a split of [0, total). The number
// of ranges is returned; range r covers a contiguous block, ranges ordered by
// index, so callers can merge per-range results deterministically.
inline int parallel_ranges(long long total,
                           const std::function<void(long long, long long, int)>& worker) {
    int threads = std::min<long long>(max_threads(), std::max<long long>(total, 1));
    if (threads <= 1 || total <= 1) {
        worker(0, total, 0);
        return 1;
    }
    std::vector<std::thread> pool;
    long long chunk = (total + threads - 1) / threads;
    int ranges = 0;
    for (long long begin = 0; begin < total; begin += chunk) {
        long long end = std::min(total, begin + chunk);
        int idx = ranges++;
        pool.emplace_back([&worker, begin, end, idx] { worker(begin, end, idx); });
    }
    for (auto& t : pool) t.join();
    return ranges;
}

}  // namespace removal_lab
