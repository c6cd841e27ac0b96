#pragma once

#include <cstdint>
#include <functional>
#include <random>

namespace bioinsure {

using Engine = std::mt19937_64;

/// Engine for substream `index` of (seed, stream_id). The key tuple is
/// expanded through std::seed_seq, so every substream is a function of the
/// tuple alone and never of how work is scheduled.
Engine substream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t index);

/// Worker count for parallel loops; 0 selects std::thread::hardware_concurrency().
struct Execution {
  unsigned workers = 0;

  unsigned resolved() const noexcept;
};

/// Calls body(i) for every i in [0, count) on up to `exec.workers` threads.
/// Indices are claimed dynamically; callers write results into per-index
/// slots so the outcome does not depend on the schedule. The first exception
/// thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t count, const Execution& exec, const std::function<void(std::size_t)>& body);

}  // namespace bioinsure
