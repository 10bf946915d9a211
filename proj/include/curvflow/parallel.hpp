#pragma once

// Threading helpers. Node maps (one write per node, no cross-node reads of
// the output) run under OpenMP when available; every reduction in the
// library is a plain serial loop in node order. That split makes all results
// bit-identical for any thread count, including a serial build.

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace curvflow::par {

// Number of threads node maps will use. Honors, in order: the programmatic
// override below, the CURVFLOW_THREADS environment variable, the OpenMP
// default. Always 1 in a serial build.
int thread_count();

// Force a specific thread count (0 clears the override). Used by the
// benchmark driver and the determinism tests.
void set_thread_override(int threads);

template <class F>
inline void for_each_node(int count, F&& body) {
#if defined(_OPENMP)
  const int threads = thread_count();
  if (threads > 1 && count >= 256) {
#pragma omp parallel for schedule(static) num_threads(threads)
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
#endif
  for (int i = 0; i < count; ++i) body(i);
}

// Parallel loop over rows (used by kernels whose inner work is one grid row).
template <class F>
inline void for_each_row(int rows, F&& body) {
#if defined(_OPENMP)
  const int threads = thread_count();
  if (threads > 1 && rows >= 8) {
#pragma omp parallel for schedule(static) num_threads(threads)
    for (int j = 0; j < rows; ++j) body(j);
    return;
  }
#endif
  for (int j = 0; j < rows; ++j) body(j);
}

}  // namespace curvflow::par
