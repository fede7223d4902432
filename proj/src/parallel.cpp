#include "limelens/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace limelens {

namespace {
std::atomic<int> g_override{0};
}

int worker_count() {
    const int forced = g_override.load();
    if (forced > 0) return forced;
    if (const char* env = std::getenv("LIME_LENS_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void set_worker_count_override(int workers) { g_override.store(workers); }

void parallel_chunks(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn) {
    if (n <= 0) return;
    const std::int64_t nchunks = (n + kRowChunk - 1) / kRowChunk;
    const int workers = static_cast<int>(std::min<std::int64_t>(worker_count(), nchunks));
    if (workers <= 1) {
        for (std::int64_t c = 0; c < nchunks; ++c) {
            fn(c * kRowChunk, std::min(n, (c + 1) * kRowChunk));
        }
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto body = [&] {
        for (;;) {
            const std::int64_t c = next.fetch_add(1);
            if (c >= nchunks || failed.load()) return;
            try {
                fn(c * kRowChunk, std::min(n, (c + 1) * kRowChunk));
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers) - 1);
    for (int w = 1; w < workers; ++w) pool.emplace_back(body);
    body();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace limelens
