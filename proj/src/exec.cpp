#include "stokesnc/exec.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace stokesnc {

int thread_cap() {
    const char* env = std::getenv("STOKES_NC_THREADS");
    if (!env) return 0;
    int n = std::atoi(env);
    return n > 0 ? n : 0;
}

void for_each_index(std::size_t n, ExecPolicy policy,
                    const std::function<void(std::size_t)>& fn) {
    if (policy == ExecPolicy::Serial) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
#ifdef _OPENMP
    const int cap = thread_cap();
    const int threads = cap > 0 ? cap : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        fn(static_cast<std::size_t>(i));
#else
    for (std::size_t i = 0; i < n; ++i) fn(i);
#endif
}

}  // namespace stokesnc
