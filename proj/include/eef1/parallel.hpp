#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace eef1 {

// Static chunked parallel loop. Work item i must write only to slot i of
// pre-sized output buffers; callers then reduce serially in index order, so
// results do not depend on the thread count.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(threads, count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) fn(i);
        });
    }
    for (std::thread& t : pool) t.join();
}

inline int threads_from_env(int fallback = 1) {
    if (const char* env = std::getenv("EEF1_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return fallback;
}

}  // namespace eef1
