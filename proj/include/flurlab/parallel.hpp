#pragma once

#include <cstddef>
#include <functional>

namespace flurlab {

// Thread budget: explicit argument wins, else FLURLAB_THREADS (0 = auto),
// else the OpenMP default.
int resolve_threads(int requested = 0);

// Replication loop over [0, n).  Each body call writes only to its own slot,
// so the OpenMP path and the serial reference path produce identical results;
// threads <= 1 runs the serial reference.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace flurlab
