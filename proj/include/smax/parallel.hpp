#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace smax {

/*
 * Deterministic parallel loop: f(i) runs once for every i in [0, n), block-
 * partitioned over the workers. Each index owns its RNG stream and its
 * output slot, and callers reduce results in index order afterwards, so the
 * outcome is identical for every thread count.
 */
template <class F>
void parallel_for(std::size_t n, int threads, F&& f) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t lo = n * w / workers;
        std::size_t hi = n * (w + 1) / workers;
        pool.emplace_back([lo, hi, &f]() {
            for (std::size_t i = lo; i < hi; ++i) f(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace smax
