#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace mvd {

// Global worker count. 0 selects std::thread::hardware_concurrency().
// Every parallel primitive below produces bit-identical results for any
// thread count: work items write disjoint outputs and reductions use a
// fixed tree structure.
void set_thread_count(int n);
int thread_count();

// Invokes fn(i) for i in [begin, end). Iterations must be independent.
void parallel_for(int begin, int end, const std::function<void(int)>& fn);

// Fixed-structure pairwise summation; the split points depend only on the
// length, never on the thread count.
double pairwise_sum(std::span<const double> values);

}  // namespace mvd
