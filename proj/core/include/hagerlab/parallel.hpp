#pragma once

#include <functional>

namespace hagerlab {

/// Worker count from HAGERLAB_THREADS, falling back to the hardware
/// parallelism. Always at least 1.
int default_workers();

/// Runs fn(0..count-1) on up to `workers` threads.  Work items are claimed
/// from a shared counter; callers must make item results independent of
/// claim order (index-addressed output slots).  If several items throw, the
/// exception of the smallest index is rethrown.
void parallel_for(int count, int workers, const std::function<void(int)>& fn);

}  // namespace hagerlab
