#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace dimred {

/// Resolves a thread-count request: 0 means "use the hardware default".
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Static-partition parallel for. `fn(begin, end)` is invoked on disjoint
/// index ranges covering [0, n). Results must be written to disjoint
/// locations so the output is identical for every thread count.
inline void parallel_for(std::size_t n, int n_threads, const std::function<void(std::size_t, std::size_t)>& fn) {
    n_threads = resolve_threads(n_threads);
    if (n == 0) return;
    std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(n_threads), n);
    if (workers <= 1) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t begin = w * chunk;
        std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& t : pool) t.join();
}

} // namespace dimred
