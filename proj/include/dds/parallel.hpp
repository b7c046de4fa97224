#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace dds {

// Deterministic block map-reduce.  The index range is cut into fixed-size
// blocks; workers claim blocks in any order, but partial results are stored
// per block and folded sequentially in block order afterwards.  Output is
// therefore independent of the thread count (acceptance requires bytewise
// reproducibility between --threads 1 and --threads k).
inline constexpr std::int64_t kBlockSize = 256;

template <class Result, class PerBlock, class Fold>
void block_map_reduce(std::int64_t lo, std::int64_t hi, int threads,
                      PerBlock per_block, Fold fold, Result init_template) {
    if (hi < lo) return;
    std::int64_t n = hi - lo + 1;
    std::int64_t nblocks = (n + kBlockSize - 1) / kBlockSize;
    std::vector<Result> partial(static_cast<std::size_t>(nblocks), init_template);

    auto run_block = [&](std::int64_t b) {
        std::int64_t first = lo + b * kBlockSize;
        std::int64_t last = std::min(hi, first + kBlockSize - 1);
        per_block(first, last, partial[static_cast<std::size_t>(b)]);
    };

    if (threads <= 1 || nblocks == 1) {
        for (std::int64_t b = 0; b < nblocks; ++b) run_block(b);
    } else {
        std::atomic<std::int64_t> next{0};
        auto worker = [&] {
            for (;;) {
                std::int64_t b = next.fetch_add(1);
                if (b >= nblocks) return;
                run_block(b);
            }
        };
        std::vector<std::thread> pool;
        int k = std::min<std::int64_t>(threads, nblocks);
        pool.reserve(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (std::int64_t b = 0; b < nblocks; ++b)
        fold(partial[static_cast<std::size_t>(b)]);
}

} // namespace dds
