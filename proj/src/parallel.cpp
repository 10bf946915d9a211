#include "curvflow/parallel.hpp"

#include <atomic>
#include <cstdlib>

namespace curvflow::par {

namespace {
std::atomic<int> g_override{0};

int env_threads() {
  const char* s = std::getenv("CURVFLOW_THREADS");
  if (!s) return 0;
  const int v = std::atoi(s);
  return v > 0 ? v : 0;
}
}  // namespace

int thread_count() {
#if defined(_OPENMP)
  const int forced = g_override.load(std::memory_order_relaxed);
  if (forced > 0) return forced;
  static const int from_env = env_threads();
  if (from_env > 0) return from_env;
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_thread_override(int threads) {
  g_override.store(threads > 0 ? threads : 0, std::memory_order_relaxed);
}

}  // namespace curvflow::par
