// Copyright (c) 2026 the wavepacket-lab developers
// SPDX-License-Identifier: Apache-2.0
//
// Deterministic tiled parallelism: work is split into contiguous index
// ranges, one per worker, so results never depend on scheduling order.

#ifndef WPLAB_PARALLEL_HPP
#define WPLAB_PARALLEL_HPP

#include <algorithm>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace wplab {

// Runs body(lo, hi) over a fixed partition of [0, tiles) across `threads`
// workers.  Exceptions from workers are rethrown on the calling thread.
inline void run_tiled(int tiles, int threads, const std::function<void(int, int)>& body)
{
    threads = std::max(1, std::min({threads, tiles, 16}));
    if (threads == 1) {
        body(0, tiles);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        int lo = tiles * w / threads;
        int hi = tiles * (w + 1) / threads;
        pool.emplace_back([&, w, lo, hi] {
            try {
                body(lo, hi);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace wplab

#endif
