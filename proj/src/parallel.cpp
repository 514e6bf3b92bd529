#include "scatterlax/parallel.hpp"

#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace scatterlax {

static int resolve_max_threads() {
#ifdef _OPENMP
  int n = omp_get_max_threads();
#else
  int n = 1;
#endif
  if (const char* env = std::getenv("SCATTERLAX_THREADS")) {
    int cap = std::atoi(env);
    if (cap > 0 && cap < n) n = cap;
  }
  return n > 0 ? n : 1;
}

int max_threads() {
  static const int n = resolve_max_threads();
  return n;
}

}  // namespace scatterlax
