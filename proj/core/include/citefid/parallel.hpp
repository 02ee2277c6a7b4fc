#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace citefid {

// Runs fn(i) for i in [0, n) on up to `workers` threads. Work is handed out in
// contiguous blocks; callers write results by index so output order never
// depends on scheduling. The first exception thrown by any worker is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
    if (n == 0) return;
    const std::size_t threads = std::min<std::size_t>(std::max(1u, workers), n);
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t block = std::max<std::size_t>(1, n / (threads * 4));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::atomic<bool> stop{false};

    auto run = [&] {
        while (!stop.load(std::memory_order_relaxed)) {
            const std::size_t begin = next.fetch_add(block);
            if (begin >= n) break;
            const std::size_t end = std::min(n, begin + block);
            try {
                for (std::size_t i = begin; i < end; ++i) fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                stop = true;
            }
        }
    };

    std::vector<std::jthread> pool;
    pool.reserve(threads - 1);
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(run);
    run();
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

// Splits [0, n) into at most `workers` contiguous ranges and runs
// fn(begin, end) on each concurrently.
template <typename Fn>
void parallel_ranges(std::size_t n, unsigned workers, Fn&& fn) {
    const std::size_t parts = std::min<std::size_t>(std::max(1u, workers), std::max<std::size_t>(1, n));
    parallel_for(parts, workers, [&](std::size_t part) { fn(n * part / parts, n * (part + 1) / parts); });
}

template <typename In, typename Fn>
auto parallel_map(const std::vector<In>& in, unsigned workers, Fn&& fn) {
    using Out = decltype(fn(in.front()));
    std::vector<Out> out(in.size());
    parallel_for(in.size(), workers, [&](std::size_t i) { out[i] = fn(in[i]); });
    return out;
}

}  // namespace citefid
