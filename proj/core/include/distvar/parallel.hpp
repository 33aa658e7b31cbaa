#pragma once

#include <functional>

namespace distvar {

/// Worker cap: DISTVAR_THREADS if set (>= 1), else hardware concurrency.
/// Read from the environment on every call so tests can flip it at runtime.
int thread_cap();

/// Runs fn(i) for i in [begin, end). Iterations must be independent and write
/// disjoint outputs; the result is then bitwise identical for any thread
/// count. Reductions do not belong here.
void parallel_for(int begin, int end, const std::function<void(int)>& fn);

}  // namespace distvar
