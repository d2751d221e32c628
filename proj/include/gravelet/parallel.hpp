#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace gravelet {

inline unsigned default_thread_count() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

inline unsigned resolved_thread_count(std::size_t count, unsigned threads) {
    if (threads == 0) threads = default_thread_count();
    return static_cast<unsigned>(std::min<std::size_t>(threads, count));
}

// Runs fn(worker, i) for i in [0, count) with worker in [0, resolved count).
// Each worker sees its index exclusively, so per-worker scratch is safe; work
// items must still write to disjoint state so results are independent of the
// thread count.
inline void parallel_for_workers(std::size_t count, unsigned threads,
                                 const std::function<void(unsigned, std::size_t)>& fn) {
    const unsigned workers = resolved_thread_count(count, threads);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(0, i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(t, i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

// Runs fn(i) for i in [0, count). Work items must write to disjoint state so
// results are independent of the thread count.
inline void parallel_for(std::size_t count, unsigned threads,
                         const std::function<void(std::size_t)>& fn) {
    parallel_for_workers(count, threads, [&fn](unsigned, std::size_t i) { fn(i); });
}

} // namespace gravelet
