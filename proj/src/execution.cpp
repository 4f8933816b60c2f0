#include "sublab/execution.hpp"

#include <omp.h>

namespace sublab {

namespace {
int configured_threads = 0;
}

void set_thread_count(int n) {
    if (n <= 0) {
        n = omp_get_num_procs();
    }
    configured_threads = n;
    omp_set_num_threads(n);
}

int thread_count() { return configured_threads > 0 ? configured_threads : omp_get_max_threads(); }

}  // namespace sublab
