#pragma once
// Fixed-block parallel loops over path indices.
//
// Work is cut into blocks of kBlockSize paths regardless of the thread count,
// and callers reduce per-block partials in block order, so floating-point
// results do not depend on how many threads ran.

#include <cstddef>
#include <functional>

namespace absde {

inline constexpr std::size_t kBlockSize = 4096;

/// 0 restores the default (ABSDE_THREADS, else hardware concurrency).
void set_thread_count(unsigned threads);
unsigned thread_count();

inline std::size_t block_count(std::size_t n) { return (n + kBlockSize - 1) / kBlockSize; }

/// Calls fn(block, begin, end) once per block of [0, n). The first exception
/// thrown by any block is rethrown after all workers join.
void parallel_blocks(std::size_t n,
                     const std::function<void(std::size_t block, std::size_t begin, std::size_t end)>& fn);

}  // namespace absde
