#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace majorant {

/// Number of worker threads: MAJORANT_THREADS if set, else hardware concurrency.
inline int thread_count() {
    if (const char* env = std::getenv("MAJORANT_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

/// Static-chunked parallel loop over [begin, end). Each index is processed by
/// exactly one thread, so the result is deterministic for deterministic bodies.
inline void parallel_for(long begin, long end, const std::function<void(long, long)>& body) {
    long n = end - begin;
    if (n <= 0) return;
    int workers = std::min<long>(thread_count(), n);
    if (workers <= 1) {
        body(begin, end);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    long chunk = (n + workers - 1) / workers;
    for (int w = 1; w < workers; ++w) {
        long lo = begin + w * chunk;
        long hi = std::min(end, lo + chunk);
        if (lo < hi) pool.emplace_back(body, lo, hi);
    }
    body(begin, std::min(end, begin + chunk));
    for (auto& t : pool) t.join();
}

}  // namespace majorant
