#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bp {

// Worker cap: BP_THREADS env var when set, otherwise hardware concurrency.
inline int worker_count() {
    if (const char* env = std::getenv("BP_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for i in [0, n). Each index writes only its own output slot, so
// results do not depend on the number of workers. serial_below skips thread
// setup for small loops; pass a lower value for coarse jobs worth spreading.
// The first exception a worker raises is rethrown on the calling thread.
template <typename Fn>
void parallel_for(int n, Fn&& fn, int serial_below = 64) {
    if (n <= 0) return;
    int workers = std::min(worker_count(), n);
    if (workers <= 1 || n < serial_below) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        int begin = static_cast<int>(static_cast<long long>(n) * w / workers);
        int end = static_cast<int>(static_cast<long long>(n) * (w + 1) / workers);
        pool.emplace_back([begin, end, &fn, &error, &error_mutex] {
            try {
                for (int i = begin; i < end; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace bp
