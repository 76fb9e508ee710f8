#ifndef QREV_PARALLEL_HPP
#define QREV_PARALLEL_HPP

#include <atomic>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace qrev {

// Run fn(i) for i in [0, n) on up to `threads` workers. Results must be
// written into index-addressed slots by the caller, which keeps output
// ordering deterministic regardless of scheduling.
inline void parallel_for_ordered(std::size_t n, int threads,
                                 const std::function<void(std::size_t)>& fn) {
    if (threads < 1) threads = 1;
    const std::size_t nthreads =
        std::min<std::size_t>(static_cast<std::size_t>(threads), n > 0 ? n : 1);
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) {
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
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace qrev

#endif
