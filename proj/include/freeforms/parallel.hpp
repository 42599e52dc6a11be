#pragma once

// Deterministic chunked parallelism.  Work is split into fixed-size chunks;
// each chunk writes disjoint output, so results do not depend on the thread
// count.  FREEFORMS_THREADS caps the number of worker threads (default 1).

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace freeforms {

inline int configured_thread_count() {
    if (const char* env = std::getenv("FREEFORMS_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

// Invokes fn(begin, end) over [0, n) in chunks of chunk_size.
inline void parallel_chunks(std::size_t n, std::size_t chunk_size,
                            const std::function<void(std::size_t, std::size_t)>& fn) {
    if (chunk_size == 0) chunk_size = 1;
    const std::size_t n_chunks = (n + chunk_size - 1) / chunk_size;
    const int threads = std::min<int>(configured_thread_count(), static_cast<int>(n_chunks));
    if (threads <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c)
            fn(c * chunk_size, std::min(n, (c + 1) * chunk_size));
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([=, &fn, &first_error, &error_mutex] {
            try {
                for (std::size_t c = static_cast<std::size_t>(t); c < n_chunks; c += static_cast<std::size_t>(threads))
                    fn(c * chunk_size, std::min(n, (c + 1) * chunk_size));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (std::thread& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace freeforms
