#pragma once

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace schatten_lab {

// --threads fallback: SCHATTEN_LAB_THREADS, then hardware concurrency.
inline int default_threads() {
    if (const char* env = std::getenv("SCHATTEN_LAB_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

// Runs fn(batch) for batch in [0, n_batches). Batches own disjoint output
// slots and derived streams, so the result is independent of thread count.
template <typename F>
void parallel_for_batches(long n_batches, int threads, F&& fn) {
    if (threads <= 1 || n_batches <= 1) {
        for (long b = 0; b < n_batches; ++b) fn(b);
        return;
    }
    std::atomic<long> next{0};
    auto worker = [&]() {
        for (long b = next.fetch_add(1); b < n_batches; b = next.fetch_add(1)) fn(b);
    };
    std::vector<std::thread> pool;
    const int n_threads = static_cast<int>(std::min<long>(threads, n_batches));
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace schatten_lab
