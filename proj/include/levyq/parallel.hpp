#pragma once

#include <cstdint>
#include <functional>

namespace levyq {

/// Worker count: hardware concurrency capped by the LEVYQ_THREADS
/// environment variable when set.
int worker_count();

/// Runs fn over [0, n) split into contiguous chunks across workers. Callers
/// must write results into disjoint preallocated slots; the partitioning must
/// never influence the values computed.
void parallel_for(std::int64_t n,
                  const std::function<void(std::int64_t, std::int64_t)>& fn);

} // namespace levyq
