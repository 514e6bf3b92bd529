#pragma once

namespace scatterlax {

// Worker count used by all OpenMP kernels: omp_get_max_threads() capped by the
// SCATTERLAX_THREADS environment variable (read once per process).
int max_threads();

}  // namespace scatterlax
