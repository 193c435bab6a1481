#ifndef PERMPRIME_PARALLEL_HPP
#define PERMPRIME_PARALLEL_HPP

#include <cstdint>
#include <thread>
#include <vector>

namespace permprime {

inline int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Splits [0, count) into contiguous chunks, evaluates fn(begin, end) on each,
// and returns the per-chunk results in chunk order, so any associative merge
// is schedule-independent.
template <class Result, class Fn>
std::vector<Result> parallel_map_chunks(std::int64_t count, int threads, Fn fn) {
  threads = resolve_thread_count(threads);
  if (count <= 0) return {};
  const std::int64_t chunks = std::min<std::int64_t>(threads, count);
  std::vector<Result> results(static_cast<std::size_t>(chunks));
  if (chunks == 1) {
    results[0] = fn(std::int64_t{0}, count);
    return results;
  }
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(chunks));
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::int64_t begin = count * c / chunks;
    const std::int64_t end = count * (c + 1) / chunks;
    workers.emplace_back([&results, &fn, c, begin, end] {
      results[static_cast<std::size_t>(c)] = fn(begin, end);
    });
  }
  for (std::thread& w : workers) w.join();
  return results;
}

}  // namespace permprime

#endif
