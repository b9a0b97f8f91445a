#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "skpower/data_io.hpp"
#include "skpower/dense_matrix.hpp"
#include "skpower/diagnostics.hpp"
#include "skpower/sketch.hpp"

namespace skpower::bench {

enum class Method {
  ClassicalRandsvd,            // Gaussian block on A itself, then Q^T A
  SketchedRandsvd,             // sketched range finder, then Q^T A
  LowrankFactorize,            // sketched power steps + sketched regression
  LowrankFactorizeUnsketched,  // S1 = I, sketched regression (generalized Nystrom)
  Nystrom,                     // sketch-powered Nystrom, psd inputs only
};

std::string method_name(Method method);
Method parse_method(const std::string& name);
/// Methods that iterate on an l-column sketch of A.
bool is_sketched(Method method);

struct BenchConfig {
  io::DatasetSpec dataset;
  std::vector<Method> methods{Method::ClassicalRandsvd, Method::SketchedRandsvd};
  std::size_t k = 40;
  std::vector<std::size_t> l_values{800, 1200, 1600};
  /// Block size; the error-vs-time protocol uses r2 = k.
  std::optional<std::size_t> r2;
  double eps = 0.5;
  /// When set, overrides both per-family iterate caps.
  std::optional<std::size_t> q_max;
  std::size_t q_max_sketched = 15;
  std::size_t q_max_classical = 5;
  std::size_t trials = 20;
  std::uint64_t root_seed = 0;
  sketch::SketchKind sketch_kind = sketch::SketchKind::count_sketch(1);
  std::filesystem::path output_path;
  bool stabilized = true;
  /// Run independent trials concurrently (correctness runs only; timings
  /// are then not comparable).
  bool parallel_trials = false;
  /// Thread cap while timing a trial.
  int timing_threads = 1;
  /// Convergence tolerance of the residual spectral-norm estimate.
  double residual_tol = 1e-6;

  /// Throws InvalidArgument unless trials >= 1 and every l >= k.
  void validate() const;
  std::size_t iterate_cap(Method method) const;
  std::size_t block_size() const { return r2.value_or(k); }
};

/// Overlays "key = value" settings onto `base`. Unknown keys throw.
BenchConfig apply_settings(const std::map<std::string, std::string>& settings,
                           BenchConfig base = {});

/// Reads a flat key-value file: one "key = value" per line, '#' comments.
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);

/// Seed of trial `trial` under the configured root.
std::uint64_t trial_seed(std::uint64_t root, std::size_t trial) noexcept;

/// Runs iterates q = 0..cap of one (method, l, trial). time_ms is the
/// sketch/setup cost plus the power steps up to q plus the largest
/// finishing cost (orthonormalize + final product) seen so far, so it never
/// decreases. Error evaluation is excluded from timing.
std::vector<io::TrialRecord> run_trial(const DenseMatrix& a, const diag::SpectralProfile& profile,
                                       const BenchConfig& config, Method method, std::size_t l,
                                       std::size_t trial);

/// Every method x l x trial; rows are appended to `writer` per trial when
/// given, and returned in deterministic (method, l, trial) order.
std::vector<io::TrialRecord> run_benchmark(const BenchConfig& config, const DenseMatrix& a,
                                           const diag::SpectralProfile& profile,
                                           io::RecordWriter* writer = nullptr);

struct CurvePoint {
  std::size_t q = 0;
  double mean_time_ms = 0.0;
  double mean_rel_err = 0.0;
  std::size_t samples = 0;
};

/// Trial-mean error-vs-time curve for one (method, l).
std::vector<CurvePoint> mean_curve(const std::vector<io::TrialRecord>& records,
                                   const std::string& method, std::size_t l);

/// Mean time of the first iterate whose mean rel_err is <= threshold.
std::optional<double> time_to_reach(const std::vector<CurvePoint>& curve, double threshold);

}  // namespace skpower::bench
