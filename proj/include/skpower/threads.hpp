#pragma once

namespace skpower {

/// Applies the SKPOWER_THREADS environment cap to the OpenMP runtime.
/// Idempotent; called by the CLI at startup.
void init_threads_from_env();

/// Current upper bound on threads used by parallel kernels.
int max_threads();

/// Runs the enclosing scope with at most `threads` OpenMP threads.
class ScopedThreadLimit {
 public:
  explicit ScopedThreadLimit(int threads);
  ~ScopedThreadLimit();
  ScopedThreadLimit(const ScopedThreadLimit&) = delete;
  ScopedThreadLimit& operator=(const ScopedThreadLimit&) = delete;

 private:
  int previous_;
};

}  // namespace skpower
