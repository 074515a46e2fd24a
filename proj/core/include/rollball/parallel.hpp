#pragma once

#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace rollball {

/// Worker count: hardware concurrency capped by the ROLLBALL_THREADS
/// environment variable (values < 1 mean serial).
inline unsigned parallel_workers() {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0)
        n = 1;
    if (const char* env = std::getenv("ROLLBALL_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1 && static_cast<unsigned long>(cap) < n)
            n = static_cast<unsigned>(cap);
        else if (end != env && cap < 1)
            n = 1;
    }
    return n;
}

/// Block-partitioned parallel loop over [0, n). body(i) must be safe to run
/// concurrently for distinct i; the first exception thrown is rethrown on
/// the calling thread after all workers join.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const unsigned workers = parallel_workers();
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    const unsigned used = static_cast<unsigned>(n < workers ? n : workers);
    pool.reserve(used);
    for (unsigned w = 0; w < used; ++w) {
        pool.emplace_back([&, w] {
            const std::size_t lo = n * w / used;
            const std::size_t hi = n * (w + 1) / used;
            for (std::size_t i = lo; i < hi; ++i) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error)
                        first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

} // namespace rollball
