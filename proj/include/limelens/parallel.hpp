#pragma once

#include <cstdint>
#include <functional>

namespace limelens {

/// Worker count: LIME_LENS_THREADS if set (>= 1), else machine parallelism.
int worker_count();

/// Force the worker count for this process (0 restores the default).
/// Exists so determinism tests can rerun work under different counts.
void set_worker_count_override(int workers);

/// Fixed chunk size used by all row-parallel loops. Chunk boundaries must
/// not depend on the worker count or results would not be reproducible.
inline constexpr std::int64_t kRowChunk = 4096;

/// Runs fn(begin, end) over [0, n) split into kRowChunk-sized chunks.
/// fn must only touch state owned by its chunk; combine partial results
/// afterwards in chunk order.
void parallel_chunks(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn);

}  // namespace limelens
