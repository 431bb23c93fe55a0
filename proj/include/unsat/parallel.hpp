#pragma once

#include <algorithm>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace unsat {

// Number of OpenMP threads the enumeration kernels may use.  The
// UNSAT_LAB_THREADS environment variable caps it; 1 disables parallelism.
inline int thread_cap() {
#ifdef _OPENMP
  int n = omp_get_max_threads();
#else
  int n = 1;
#endif
  if (const char* env = std::getenv("UNSAT_LAB_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

}  // namespace unsat
