#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace otdf {

// Runs fn(i) for i in [0, n) across hardware threads. Work items must be
// independent; callers store results by index so output order matches input
// order no matter how items are scheduled.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const unsigned hw = std::thread::hardware_concurrency();
    const unsigned workers = hw == 0 ? 1 : hw;
    if (workers == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                if (!failed.exchange(true)) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned count = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    pool.reserve(count);
    for (unsigned i = 0; i < count; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace otdf
