#pragma once

// Minimal deterministic work-splitting helpers. Workers process disjoint
// chunks; callers merge in chunk order, so results never depend on the
// worker count.

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace tdes {

// Resolve a worker count: explicit request > TDES_WORKERS > hardware.
inline int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("TDES_WORKERS")) {
        int w = std::atoi(env);
        if (w > 0) return w;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Run fn(chunk_index, begin, end) over [0, n) split into `chunks` ranges.
// fn must only touch per-chunk state.
template <class Fn>
void parallel_chunks(std::size_t n, int workers, Fn&& fn) {
    workers = resolve_workers(workers);
    std::size_t chunks = static_cast<std::size_t>(workers);
    if (chunks > n) chunks = n == 0 ? 1 : n;
    if (chunks <= 1) {
        fn(std::size_t{0}, std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(chunks);
    std::size_t per = n / chunks, extra = n % chunks, begin = 0;
    for (std::size_t c = 0; c < chunks; ++c) {
        std::size_t len = per + (c < extra ? 1 : 0);
        std::size_t end = begin + len;
        pool.emplace_back([&fn, c, begin, end] { fn(c, begin, end); });
        begin = end;
    }
    for (auto& th : pool) th.join();
}

}  // namespace tdes
