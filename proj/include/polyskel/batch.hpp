#pragma once

#include <cstddef>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace polyskel {

// Thread count from POLYSKEL_THREADS, 0 when unset or invalid.
inline int env_threads() {
  const char* s = std::getenv("POLYSKEL_THREADS");
  if (!s) return 0;
  try {
    const int n = std::stoi(s);
    return n > 0 ? n : 0;
  } catch (...) {
    return 0;
  }
}

// Runs fn(i) for i in [0, n). Jobs must write only to slot i of their output,
// so the serial and parallel runs give identical results.
template <class Fn>
void serial_for(std::size_t n, Fn&& fn) {
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, int threads = 0) {
#ifdef _OPENMP
  if (threads <= 0) threads = env_threads();
  if (threads <= 0) threads = omp_get_max_threads();
  const long long m = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long long i = 0; i < m; ++i) fn(static_cast<std::size_t>(i));
#else
  (void)threads;
  serial_for(n, fn);
#endif
}

}  // namespace polyskel
