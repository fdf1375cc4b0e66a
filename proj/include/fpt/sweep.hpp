// sweep.hpp — Deterministic parallel map over independent work items

#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace fpt {

// Evaluate fn(0..count-1) on `workers` threads and return the results in
// index order. Scheduling order never affects the output: each result lands
// in its input slot, so any worker count (including 1) produces identical
// bytes downstream. The first exception thrown by fn is rethrown after all
// workers have drained.
template <typename R>
std::vector<R> map_indexed(std::size_t count, int workers,
                           const std::function<R(std::size_t)>& fn) {
    std::vector<R> results(count);
    if (count == 0) return results;
    int n = workers < 1 ? 1 : workers;
    if (static_cast<std::size_t>(n) > count) n = static_cast<int>(count);

    if (n == 1) {
        for (std::size_t i = 0; i < count; ++i) results[i] = fn(i);
        return results;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    results[i] = fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
    return results;
}

} // namespace fpt
