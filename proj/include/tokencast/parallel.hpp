#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tokencast {

/**
 * Runs fn(i) for i in [0, count) on up to `threads` workers. Work items
 * must be independent (each derives its own rng stream), so the result
 * does not depend on the worker count. The first exception thrown by
 * any item is rethrown on the caller's thread.
 */
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
    if (count == 0) return;
    const std::size_t workers =
        std::min<std::size_t>(count, threads < 1 ? 1 : static_cast<std::size_t>(threads));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count || failed.load()) return;
                try {
                    fn(i);
                } catch (...) {
                    std::scoped_lock lock(error_mutex);
                    if (!error) error = std::current_exception();
                    failed.store(true);
                    return;
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace tokencast
