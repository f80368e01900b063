#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace qcf {

/// Split [lo, hi) into contiguous chunks, run fn(chunk_lo, chunk_hi) on a
/// worker per chunk, and return the results in range order. Reductions stay
/// deterministic for any thread count because merging happens chunk-by-chunk
/// in ascending order after all workers finish.
template <typename Result, typename Fn>
std::vector<Result> parallel_map_chunks(std::uint64_t lo, std::uint64_t hi, unsigned threads,
                                        Fn fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    std::uint64_t span = hi > lo ? hi - lo : 0;
    std::uint64_t nchunks = std::min<std::uint64_t>(threads, span ? span : 1);
    if (nchunks <= 1) return {fn(lo, hi)};

    std::vector<Result> results(nchunks);
    std::vector<std::thread> workers;
    workers.reserve(nchunks);
    for (std::uint64_t c = 0; c < nchunks; ++c) {
        std::uint64_t a = lo + span * c / nchunks;
        std::uint64_t b = lo + span * (c + 1) / nchunks;
        workers.emplace_back([&, a, b, c] { results[c] = fn(a, b); });
    }
    for (auto& w : workers) w.join();
    return results;
}

}  // namespace qcf
