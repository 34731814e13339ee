#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace quadbal {

// Runs fn(i) for i in [0, n). threads <= 1 runs serially in index order.
// Work items must write only to their own slots; results are then identical
// for any thread count.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t nworkers = std::min<std::size_t>(threads, n);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nworkers);
    std::exception_ptr error;
    std::mutex error_mutex;
    for (std::size_t w = 0; w < nworkers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

inline int hardware_threads() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

}  // namespace quadbal
