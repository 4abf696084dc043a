#include "qsfp/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qsfp {
namespace {

std::atomic<unsigned> g_threads{std::max(1u, std::thread::hardware_concurrency())};

}  // namespace

void set_thread_count(unsigned n) { g_threads = std::max(1u, n); }

unsigned thread_count() { return g_threads.load(); }

void parallel_for(std::size_t jobs, const std::function<void(std::size_t)>& job) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), jobs);
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs) return;
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = jobs;
        return;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  pool.clear();
  if (error) std::rethrow_exception(error);
}

void parallel_chunks(std::size_t items,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body,
                     std::size_t chunk) {
  const std::size_t chunks = chunk_count(items, chunk);
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t begin = c * chunk;
    body(c, begin, std::min(items, begin + chunk));
  });
}

}  // namespace qsfp
