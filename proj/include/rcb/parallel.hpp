#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

namespace rcb {

int num_threads();
void set_num_threads(int n);

/// Runs fn(i) for i in [0, n). Work is handed out dynamically, so callers must
/// write results by index; that keeps every reduction order independent of the
/// thread count.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(num_threads()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Fixed chunk width for range enumeration. Chunks never depend on the number
/// of threads.
inline constexpr std::uint64_t kEnumerationChunk = std::uint64_t{1} << 14;

/// Calls fn(begin, end) over fixed-width chunks of [0, n) in parallel and
/// returns the per-chunk results in chunk order.
template <class T, class Fn>
std::vector<T> chunked_map(std::uint64_t n, Fn&& fn) {
  const std::uint64_t chunks = (n + kEnumerationChunk - 1) / kEnumerationChunk;
  std::vector<T> out(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    const std::uint64_t begin = c * kEnumerationChunk;
    const std::uint64_t end = std::min(n, begin + kEnumerationChunk);
    out[c] = fn(begin, end);
  });
  return out;
}

}  // namespace rcb
