#pragma once

#include <functional>

namespace tpan {

/// Worker count used by all parallel loops. Defaults to hardware
/// concurrency; overridable via set_thread_count() or the TPAN_THREADS
/// environment variable.
int thread_count();
void set_thread_count(int n);

/// Fixed partition count for deterministic reductions. Work is split into
/// this many contiguous ranges regardless of how many threads execute
/// them, so per-partition accumulators merge in the same order for any
/// thread count.
constexpr int kPartitionCount = 16;

/// Splits [0, n) into at most kPartitionCount contiguous ranges and runs
/// fn(part_index, begin, end) for each, possibly on different threads.
/// The partitioning depends only on n.
void parallel_partitions(int n, const std::function<void(int, int, int)>& fn);

/// Row-parallel helper: fn(begin_row, end_row) over disjoint ranges.
void parallel_rows(int rows, const std::function<void(int, int)>& fn);

}  // namespace tpan
