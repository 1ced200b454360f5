#ifndef FLINTHILLS_PARALLEL_HPP
#define FLINTHILLS_PARALLEL_HPP

#include <algorithm>
#include <cstdint>
#include <exception>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

namespace flinthills {

/// Fixed reduction granularity. Chunk c covers [c*L + 1, (c+1)*L].
inline constexpr std::uint64_t kChunkLength = std::uint64_t{1} << 14;

struct IndexRange {
  std::uint64_t first;
  std::uint64_t last;  ///< inclusive
};

/// Splits [first, last] at multiples of `chunk_length`.
inline std::vector<IndexRange> chunk_ranges(std::uint64_t first, std::uint64_t last,
                                            std::uint64_t chunk_length = kChunkLength) {
  std::vector<IndexRange> ranges;
  std::uint64_t lo = first;
  while (lo <= last && lo != 0) {
    const std::uint64_t boundary = ((lo - 1) / chunk_length + 1) * chunk_length;
    const std::uint64_t hi = std::min(boundary, last);
    ranges.push_back({lo, hi});
    if (hi == last) break;
    lo = hi + 1;
  }
  return ranges;
}

/// Evaluates `compute(range)` for every chunk of [first, last], up to `jobs`
/// chunks at a time, and hands results to `merge(range, result)` strictly in
/// ascending chunk order on the calling thread. The first failing chunk (by
/// index) rethrows after all earlier chunks were merged, so output and errors
/// do not depend on the worker count.
template <class Compute, class Merge>
void for_each_chunk(std::uint64_t first, std::uint64_t last, unsigned jobs, Compute&& compute, Merge&& merge) {
  using Result = decltype(compute(std::declval<IndexRange>()));
  const std::vector<IndexRange> ranges = chunk_ranges(first, last);
  const std::size_t wave = std::max(1u, jobs);

  for (std::size_t start = 0; start < ranges.size(); start += wave) {
    const std::size_t count = std::min(wave, ranges.size() - start);
    std::vector<std::optional<Result>> results(count);
    std::vector<std::exception_ptr> failures(count);
    auto work = [&](std::size_t i) {
      try {
        results[i].emplace(compute(ranges[start + i]));
      } catch (...) {
        failures[i] = std::current_exception();
      }
    };

    std::vector<std::thread> workers;
    workers.reserve(count - 1);
    for (std::size_t i = 1; i < count; ++i) workers.emplace_back(work, i);
    work(0);
    for (auto& worker : workers) worker.join();

    for (std::size_t i = 0; i < count; ++i) {
      if (failures[i]) std::rethrow_exception(failures[i]);
      merge(ranges[start + i], std::move(*results[i]));
    }
  }
}

}  // namespace flinthills

#endif  // FLINTHILLS_PARALLEL_HPP
