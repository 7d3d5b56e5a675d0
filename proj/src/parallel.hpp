#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace seoe {

// Runs fn(i) for i in [0, n) on up to max_workers threads. The first thrown
// exception is rethrown on the caller after all workers join. Callers that
// need per-item error collection catch inside fn.
template <typename Fn>
void parallel_for(std::size_t n, int max_workers, Fn&& fn) {
    if (n == 0) return;
    std::size_t workers = static_cast<std::size_t>(max_workers > 0 ? max_workers : 1);
    if (workers > n) workers = n;
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace seoe
