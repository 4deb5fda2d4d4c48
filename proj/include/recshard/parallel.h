// Copyright 2026 The recshard Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef RECSHARD_PARALLEL_H_
#define RECSHARD_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace recshard {

// Worker count from RECSHARD_THREADS, else the hardware concurrency; >= 1.
int ThreadsFromEnv();

// Calls fn(i) for every i in [0, n) on up to `threads` threads. Callers write
// results by index, so output never depends on scheduling. If any call
// throws, the exception from the lowest index is rethrown after all workers
// stop.
void ParallelFor(size_t n, const std::function<void(size_t)>& fn,
                 int threads = ThreadsFromEnv());

}  // namespace recshard

#endif  // RECSHARD_PARALLEL_H_
