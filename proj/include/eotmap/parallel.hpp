#ifndef EOTMAP_PARALLEL_HPP
#define EOTMAP_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace eotmap {

namespace detail {
inline std::atomic<unsigned>& thread_count_setting() {
    static std::atomic<unsigned> count{std::max(1u, std::thread::hardware_concurrency())};
    return count;
}
}  // namespace detail

/// Number of worker threads used by parallel loops. Results never depend on it.
inline unsigned thread_count() { return detail::thread_count_setting().load(); }

inline void set_thread_count(unsigned n) { detail::thread_count_setting().store(std::max(1u, n)); }

/// Runs fn(i) for every i in [begin, end) using contiguous chunks.
/// Each index is visited by exactly one thread, so as long as fn(i) only
/// writes slot i the output is identical for any thread count.
template <typename Fn>
void parallel_for(std::ptrdiff_t begin, std::ptrdiff_t end, Fn&& fn, std::ptrdiff_t min_chunk = 16) {
    const std::ptrdiff_t total = end - begin;
    if (total <= 0) {
        return;
    }
    const auto max_workers = static_cast<std::ptrdiff_t>(thread_count());
    const std::ptrdiff_t workers = std::clamp<std::ptrdiff_t>(total / std::max<std::ptrdiff_t>(min_chunk, 1), 1, max_workers);
    if (workers == 1) {
        for (std::ptrdiff_t i = begin; i < end; ++i) {
            fn(i);
        }
        return;
    }

    std::exception_ptr failure;
    std::mutex failure_mutex;
    const std::ptrdiff_t chunk = (total + workers - 1) / workers;
    {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (std::ptrdiff_t w = 0; w < workers; ++w) {
            const std::ptrdiff_t lo = begin + w * chunk;
            const std::ptrdiff_t hi = std::min(end, lo + chunk);
            if (lo >= hi) {
                break;
            }
            pool.emplace_back([&, lo, hi] {
                try {
                    for (std::ptrdiff_t i = lo; i < hi; ++i) {
                        fn(i);
                    }
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace eotmap

#endif  // EOTMAP_PARALLEL_HPP
