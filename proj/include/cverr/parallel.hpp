#pragma once

namespace cverr {

// Trial loops run either serially or OpenMP-parallel. Both paths produce
// bit-identical results: each trial derives its own random stream from
// (seed, trial index) and writes only to its own output slot, and
// reductions happen afterwards in a fixed order.
enum class ExecutionMode { serial, parallel };

template <class Body>
void for_each_trial(int trials, ExecutionMode mode, Body&& body) {
#ifdef _OPENMP
    if (mode == ExecutionMode::parallel) {
#pragma omp parallel for schedule(static)
        for (int t = 0; t < trials; ++t) {
            body(t);
        }
        return;
    }
#endif
    (void)mode;
    for (int t = 0; t < trials; ++t) {
        body(t);
    }
}

}  // namespace cverr
