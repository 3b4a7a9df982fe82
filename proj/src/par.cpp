#include <mbps/par.hpp>

#include <atomic>

namespace mbps::par {

namespace {
    std::atomic<int> g_workers{0};
}

int max_workers()
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

int workers()
{
    int w = g_workers.load(std::memory_order_relaxed);
    return w > 0 ? w : max_workers();
}

void set_workers(int n)
{
#ifdef _OPENMP
    // One active level keeps per-dimension fits serial inside an already
    // parallel population loop.
    omp_set_max_active_levels(1);
#endif
    g_workers.store(n, std::memory_order_relaxed);
}

} // namespace mbps::par
