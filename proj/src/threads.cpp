#include "skpower/threads.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace skpower {

void init_threads_from_env() {
  const char* raw = std::getenv("SKPOWER_THREADS");
  if (raw == nullptr || *raw == '\0') return;
  try {
    const int n = std::stoi(raw);
    if (n >= 1) omp_set_num_threads(n);
  } catch (const std::exception&) {
    // ignored: an unparsable cap leaves the runtime default in place
  }
}

int max_threads() { return omp_get_max_threads(); }

ScopedThreadLimit::ScopedThreadLimit(int threads) : previous_(omp_get_max_threads()) {
  omp_set_num_threads(threads < 1 ? 1 : threads);
}

ScopedThreadLimit::~ScopedThreadLimit() { omp_set_num_threads(previous_); }

}  // namespace skpower
