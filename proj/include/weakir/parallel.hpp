#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace weakir {

inline unsigned default_workers() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

/// Runs fn(chunk_index, begin, end) over contiguous chunks of [0, n).
/// Chunk boundaries depend only on (n, workers), so callers that write into
/// per-chunk slots get scheduling-independent results. The first exception
/// thrown by any chunk is rethrown after all threads join.
template <typename Fn>
void parallel_chunks(std::size_t n, unsigned workers, Fn&& fn) {
  if (n == 0) return;
  if (workers <= 1 || n == 1) {
    fn(std::size_t{0}, std::size_t{0}, n);
    return;
  }
  const std::size_t chunk_count = std::min<std::size_t>(workers, n);
  const std::size_t per_chunk = (n + chunk_count - 1) / chunk_count;
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(chunk_count);
  threads.reserve(chunk_count);
  for (std::size_t c = 0; c < chunk_count; ++c) {
    const std::size_t begin = c * per_chunk;
    const std::size_t end = std::min(n, begin + per_chunk);
    if (begin >= end) break;
    threads.emplace_back([&, c, begin, end] {
      try {
        fn(c, begin, end);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
}

/// Element-wise parallel loop; fn(i) must only touch state owned by index i.
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  parallel_chunks(n, workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) fn(i);
  });
}

}  // namespace weakir
