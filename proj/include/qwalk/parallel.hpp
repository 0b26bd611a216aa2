#pragma once
#include <cstddef>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qwalk {

// Worker count resolution: explicit argument > QWALK_WORKERS env > OpenMP
// default.  A value of 1 forces the serial reference path.
inline int resolve_workers(int requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("QWALK_WORKERS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Deterministic blocked sample loop.  Samples are grouped into fixed blocks;
// fn(sample_index, block_index) must accumulate into per-block storage only.
// Blocks may run on any thread in any order, but the contents of one block
// are always processed in index order by a single thread, so reducing the
// per-block partials in block order afterwards yields results that do not
// depend on the worker count or schedule.
constexpr std::size_t kSampleBlock = 8;

inline std::size_t block_count(std::size_t samples, std::size_t block = kSampleBlock) {
    return (samples + block - 1) / block;
}

template <class Fn>
void for_each_sample_blocked(std::size_t samples, int workers, Fn&& fn,
                             std::size_t block = kSampleBlock) {
    const std::size_t nblocks = block_count(samples, block);
    if (workers <= 1) {
        // Serial reference path: identical traversal order as one big thread.
        for (std::size_t b = 0; b < nblocks; ++b) {
            const std::size_t end = std::min(samples, (b + 1) * block);
            for (std::size_t i = b * block; i < end; ++i) fn(i, b);
        }
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(workers)
    for (long long bs = 0; bs < static_cast<long long>(nblocks); ++bs) {
        const std::size_t b = static_cast<std::size_t>(bs);
        const std::size_t end = std::min(samples, (b + 1) * block);
        for (std::size_t i = b * block; i < end; ++i) fn(i, b);
    }
#else
    for (std::size_t b = 0; b < nblocks; ++b) {
        const std::size_t end = std::min(samples, (b + 1) * block);
        for (std::size_t i = b * block; i < end; ++i) fn(i, b);
    }
#endif
}

}  // namespace qwalk
