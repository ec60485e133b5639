#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace rshadow {

/// Run fn(r) for r in [0, count), sharded contiguously over `workers`
/// threads.  Callers write results into per-index slots, so the outcome is
/// identical for any worker count.
template <typename Fn>
void parallel_rounds(std::uint64_t count, unsigned workers, Fn&& fn) {
    if (workers <= 1 || count < 2) {
        for (std::uint64_t r = 0; r < count; ++r) fn(r);
        return;
    }
    const unsigned w = std::min<unsigned>(workers, std::thread::hardware_concurrency() * 4 + 1);
    std::vector<std::thread> threads;
    threads.reserve(w);
    const std::uint64_t chunk = (count + w - 1) / w;
    for (unsigned t = 0; t < w; ++t) {
        const std::uint64_t lo = t * chunk;
        const std::uint64_t hi = std::min<std::uint64_t>(count, lo + chunk);
        if (lo >= hi) break;
        threads.emplace_back([lo, hi, &fn] {
            for (std::uint64_t r = lo; r < hi; ++r) fn(r);
        });
    }
    for (auto& th : threads) th.join();
}

}  // namespace rshadow
