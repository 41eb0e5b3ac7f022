#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace vibro {

// Runs fn(i) for i in [0, n). Work is split into one contiguous chunk per
// thread; every index writes only its own outputs, so results are identical
// for any thread count.
template <class Fn>
void parallel_for(std::int64_t n, int threads, Fn&& fn) {
    if (n <= 0) return;
    const int nt =
        int(std::clamp<std::int64_t>(threads, 1, std::min<std::int64_t>(n, 256)));
    if (nt == 1) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(nt);
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) {
        const std::int64_t lo = n * t / nt;
        const std::int64_t hi = n * (t + 1) / nt;
        pool.emplace_back([&, lo, hi, t] {
            try {
                for (std::int64_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace vibro
