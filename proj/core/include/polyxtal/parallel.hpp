#ifndef POLYXTAL_PARALLEL_HPP
#define POLYXTAL_PARALLEL_HPP

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace polyxtal {

/// Runs fn(i) for i in [0, count) on `threads` workers pulling from a shared
/// counter, storing results in order. The caller reduces the returned vector
/// sequentially, which keeps ensemble folds deterministic under any thread
/// count.
template <typename R, typename Fn>
std::vector<R> map_indexed(int count, int threads, Fn&& fn) {
    std::vector<R> out(static_cast<std::size_t>(count));
    if (threads < 1) threads = 1;
    if (threads == 1) {
        for (int i = 0; i < count; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count || failed.load()) return;
                try {
                    out[i] = fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) first_error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

} // namespace polyxtal

#endif
