#pragma once
// Process-wide worker count for the embarrassingly parallel loops (sampling,
// per-mode stepping). Work is partitioned into disjoint index ranges writing
// disjoint slots, so results are bit-identical for every thread count.

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace enls {

inline std::atomic<int>& thread_count_ref() {
    static std::atomic<int> n{1};
    return n;
}
inline void set_thread_count(int n) { thread_count_ref() = n < 1 ? 1 : n; }
inline int thread_count() { return thread_count_ref(); }

// fn(i) for i in [0, count), partitioned contiguously over the worker threads
template <typename Fn>
void parallel_for(std::size_t count, const Fn& fn) {
    const int workers = std::min<std::size_t>(thread_count(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace enls
