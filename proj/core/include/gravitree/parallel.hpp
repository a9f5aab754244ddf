#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace gravitree {

inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Runs fn(begin, end, worker) over a fixed partition of [0, n) into
// `threads` contiguous chunks. The partition depends only on (n, threads),
// so per-worker outputs can be merged in worker order deterministically.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (n == 0) return;
    if (threads == 1 || n == 1) {
        fn(std::size_t{0}, n, 0u);
        return;
    }
    if (static_cast<std::size_t>(threads) > n) threads = static_cast<unsigned>(n);

    std::vector<std::thread> pool;
    pool.reserve(threads - 1);
    std::vector<std::exception_ptr> errors(threads);

    auto run = [&](unsigned w) {
        const std::size_t begin = n * w / threads;
        const std::size_t end = n * (w + 1) / threads;
        try {
            fn(begin, end, w);
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };
    for (unsigned w = 1; w < threads; ++w) pool.emplace_back(run, w);
    run(0);
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace gravitree
