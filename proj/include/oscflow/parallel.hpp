#pragma once

#include <functional>

namespace oscflow {

// Worker count used by parallel_for; 0 or 1 runs inline.
void set_thread_count(int threads);
int thread_count();

// Runs body(i) for i in [0, count) on a static partition of the index range.
// Callers write results into per-index slots and reduce in index order, so
// output does not depend on the thread count.
void parallel_for(int count, const std::function<void(int)>& body);

}  // namespace oscflow
