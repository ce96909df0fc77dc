#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hcmeta {

// Worker count for an OpenMP region; non-positive requests fall back to the runtime default.
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace hcmeta
