#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace opbmo {

/// Worker count for a job list: hardware concurrency, capped by the
/// OPBMO_THREADS environment variable when set to a positive integer, and
/// never more than the number of jobs.
inline int thread_count(int jobs) {
    int workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;
    if (const char* cap = std::getenv("OPBMO_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(cap, &end, 10);
        if (end != cap && *end == '\0' && v >= 1 && v <= 1 << 16)
            workers = std::min(workers, static_cast<int>(v));
    }
    return std::max(1, std::min(workers, jobs));
}

/// Runs fn(i) for i in [0, jobs) on a small thread pool. fn must be safe to
/// call concurrently for distinct i; the first exception thrown by any job is
/// rethrown after all workers finish.
inline void parallel_for(int jobs, const std::function<void(int)>& fn) {
    int workers = thread_count(jobs);
    if (workers <= 1) {
        for (int i = 0; i < jobs; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next++; i < jobs; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace opbmo
