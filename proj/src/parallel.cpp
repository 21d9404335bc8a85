#include "dpsim/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

#include "dpsim/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dpsim {

int worker_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_worker_count(int workers) {
    if (workers < 1) {
        throw DomainError("worker count must be >= 1");
    }
#ifdef _OPENMP
    omp_set_num_threads(workers);
#endif
}

int worker_count_from_env() {
    const char* env = std::getenv("DPSIM_WORKERS");
    if (env == nullptr) {
        return 0;
    }
    int value = 0;
    const char* end = env + std::strlen(env);
    auto [ptr, ec] = std::from_chars(env, end, value);
    if (ec != std::errc{} || ptr != end || value < 1) {
        return 0;
    }
    return value;
}

}  // namespace dpsim
