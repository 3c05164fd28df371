#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace featcode {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(thread_index, begin, end) over contiguous chunks of [0, n).
/// Chunk boundaries depend only on n and thread count, so per-thread
/// results can be reduced deterministically in thread order.
template <typename Fn>
void parallel_chunks(std::size_t n, int threads, Fn&& fn) {
    const int t = resolve_threads(threads);
    if (t <= 1 || n <= 1) {
        if (n > 0) fn(0, std::size_t{0}, n);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(t), n);
    const std::size_t base = n / workers;
    const std::size_t extra = n % workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t begin = 0;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t len = base + (w < extra ? 1 : 0);
        const std::size_t end = begin + len;
        pool.emplace_back([&fn, w, begin, end] { fn(static_cast<int>(w), begin, end); });
        begin = end;
    }
    for (std::thread& th : pool) th.join();
}

}  // namespace featcode
