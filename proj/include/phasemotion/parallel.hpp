#pragma once

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace phasemotion {

// Worker cap: hardware concurrency, capped by PHASEMOTION_THREADS when set.
inline int max_threads() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* env = std::getenv("PHASEMOTION_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1 && cap < n) n = static_cast<int>(cap);
    }
    return n;
}

// Runs fn(i) for i in [0, n). Each index must write only its own slots, so
// results are identical regardless of thread count or scheduling.
template <typename Fn>
void parallel_for(int n, Fn&& fn) {
    const int workers = std::min(n, max_threads());
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (std::thread& t : pool) t.join();
}

}  // namespace phasemotion
