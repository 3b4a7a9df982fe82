#pragma once

#include <algorithm>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mbps::par {

// Global worker count for all parallel loops. 0 or negative selects the
// OpenMP default. Results are independent of this value: every loop body
// writes to its own slot and reductions happen serially afterwards.
int workers();
void set_workers(int n);
int max_workers();

template <typename F>
void parallel_for(int n, F&& body)
{
    if (n <= 0)
        return;
    const int w = std::min(workers(), n);
    if (w <= 1 || n == 1) {
        for (int i = 0; i < n; ++i)
            body(i);
        return;
    }
#ifdef _OPENMP
    std::exception_ptr error;
#pragma omp parallel for schedule(static) num_threads(w)
    for (int i = 0; i < n; ++i) {
        try {
            body(i);
        }
        catch (...) {
#pragma omp critical
            {
                if (!error)
                    error = std::current_exception();
            }
        }
    }
    if (error)
        std::rethrow_exception(error);
#else
    for (int i = 0; i < n; ++i)
        body(i);
#endif
}

} // namespace mbps::par
