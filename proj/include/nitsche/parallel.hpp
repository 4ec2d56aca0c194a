#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace nitsche {

/**
 * Worker count for element loops. NITSCHE_FEM_THREADS caps it; 0 or 1 means
 * serial. Without the variable the hardware concurrency is used.
 */
[[nodiscard]] inline std::size_t worker_count()
{
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("NITSCHE_FEM_THREADS")) {
        try {
            const long cap = std::stol(env);
            if (cap <= 1) return 1;
            return std::min<std::size_t>(hw, static_cast<std::size_t>(cap));
        } catch (const std::exception&) {
            return 1;
        }
    }
    return hw;
}

/**
 * Calls fn(i) for i in [0, n) over contiguous chunks. fn must only write to
 * slot i of its output, so results do not depend on the worker count.
 */
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn)
{
    const std::size_t workers = std::min(worker_count(), std::max<std::size_t>(1, n / 64));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            try {
                const std::size_t end = std::min(n, (w + 1) * chunk);
                for (std::size_t i = w * chunk; i < end; ++i) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

} // namespace nitsche
