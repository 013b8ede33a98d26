#include "absde/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace absde {
namespace {

unsigned default_threads() {
    if (const char* env = std::getenv("ABSDE_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::atomic<unsigned> g_threads{0};

}  // namespace

void set_thread_count(unsigned threads) { g_threads.store(threads); }

unsigned thread_count() {
    const unsigned t = g_threads.load();
    return t == 0 ? default_threads() : t;
}

void parallel_blocks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    const std::size_t blocks = block_count(n);
    const std::size_t workers = std::min<std::size_t>(thread_count(), blocks);
    if (workers <= 1) {
        for (std::size_t b = 0; b < blocks; ++b) fn(b, b * kBlockSize, std::min(n, (b + 1) * kBlockSize));
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto work = [&] {
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= blocks) return;
            try {
                fn(b, b * kBlockSize, std::min(n, (b + 1) * kBlockSize));
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure) failure = std::current_exception();
                next.store(blocks);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace absde
