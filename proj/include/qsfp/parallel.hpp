#pragma once

#include <cstddef>
#include <functional>

namespace qsfp {

/// Worker count used by all data-parallel loops. Defaults to the hardware
/// concurrency. Results never depend on this value: work is split into
/// fixed-size chunks, each with its own derived random stream.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Number of items per chunk for chunked Monte Carlo loops.
inline constexpr std::size_t kChunkSize = 1u << 14;

inline std::size_t chunk_count(std::size_t items, std::size_t chunk = kChunkSize) {
  return (items + chunk - 1) / chunk;
}

/// Runs job(i) for i in [0, jobs) on the worker pool. The first exception
/// thrown by any job is rethrown on the calling thread.
void parallel_for(std::size_t jobs, const std::function<void(std::size_t)>& job);

/// Chunked variant: body(chunk_index, begin, end) over [0, items).
void parallel_chunks(std::size_t items,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body,
                     std::size_t chunk = kChunkSize);

}  // namespace qsfp
