#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace dpre {

// Run fn(i) for i in [0, n). Work is split into contiguous index ranges and
// each fn(i) must write only to its own slot, so results are identical for
// any worker count.
inline void parallel_for(std::int64_t n, int workers,
                         const std::function<void(std::int64_t)>& fn) {
    if (workers <= 1 || n < 2) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const int w = static_cast<int>(std::min<std::int64_t>(workers, n));
    std::vector<std::thread> pool;
    pool.reserve(w);
    const std::int64_t chunk = (n + w - 1) / w;
    for (int t = 0; t < w; ++t) {
        const std::int64_t lo = t * chunk;
        const std::int64_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::int64_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace dpre
