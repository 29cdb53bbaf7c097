#pragma once

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace qjump {

// Runs fn(i) for i in [0, n) on up to `threads` workers and collects results
// by index, so output is independent of scheduling. Exceptions are captured
// per index and the lowest-index one is rethrown after all workers join.
template <class Result, class Fn>
std::vector<Result> parallel_map_indexed(std::size_t n, unsigned threads, Fn&& fn) {
    std::vector<Result> results(n);
    if (n == 0) return results;
    if (threads == 0) threads = 1;

    if (threads == 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) results[i] = fn(i);
        return results;
    }

    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                results[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    std::vector<std::thread> pool;
    unsigned count = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    pool.reserve(count);
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

} // namespace qjump
