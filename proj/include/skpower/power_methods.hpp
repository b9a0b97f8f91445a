#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "skpower/dense_matrix.hpp"
#include "skpower/linalg.hpp"
#include "skpower/sketch.hpp"

namespace skpower::power {

/// Substream indices under RangeFinderSpec::seed.
enum class SeedStream : std::uint64_t {
  PrimarySketch = 0,     // S (or S1)
  Omega = 1,             // starting block
  RegressionSketch = 2,  // S2
};

/// Parameters of the sketch-powered range finder and its factorization
/// variants.
struct RangeFinderSpec {
  std::size_t k = 1;   // target rank
  std::size_t l = 1;   // intermediate rank driving r1
  std::size_t r1 = 1;  // primary sketch size
  std::size_t r2 = 2;  // block size of the starting matrix
  std::size_t q = 0;   // power iterations
  double eps = 0.5;    // nominal accuracy in (0, 1/2]
  sketch::SketchKind sketch_kind = sketch::SketchKind::count_sketch(1);
  /// Starting block family. Gaussian is what the guarantees assume; any
  /// other choice is an ablation outside theory.
  sketch::SketchKind omega_kind = sketch::SketchKind::gaussian();
  /// Family of S2 in lowrank_factorize; defaults to sketch_kind. Identity
  /// makes the regression step an exact projection.
  std::optional<sketch::SketchKind> regression_kind;
  /// Columns of S2; defaults to r1 (ignored for an identity S2).
  std::optional<std::size_t> regression_dim;
  std::uint64_t seed = 0;
  /// Re-orthonormalize between power steps (same span in exact arithmetic).
  bool stabilized = true;

  /// Throws InvalidArgument unless 1 <= k <= l <= min(m, n), r2 >= k,
  /// r1 >= 1 and eps in (0, 1/2].
  void validate(std::size_t m, std::size_t n) const;

  /// Derives r1 from sketch_size at rank l, r2 = 2k and q = choose_q(eps,
  /// min(m, r1)). For CountSketch the companion s replaces
  /// kind.nnz_per_row unless `keep_nnz` is set.
  static RangeFinderSpec from_accuracy(std::size_t m, std::size_t n, std::size_t k,
                                       std::size_t l, double eps, sketch::SketchKind kind,
                                       std::uint64_t seed,
                                       double c = sketch::kDefaultSizeConstant,
                                       sketch::CountSketchRegime regime =
                                           sketch::CountSketchRegime::B,
                                       double delta = 0.1, bool keep_nnz = false);
};

struct StageTimings {
  double sketch_ms = 0.0;   // forming A S (and S2^T A, C~, W~)
  double iterate_ms = 0.0;  // power steps
  double solve_ms = 0.0;    // orthonormalization / regression / final products
  double total_ms() const { return sketch_ms + iterate_ms + solve_ms; }
};

struct FactorizationResult {
  DenseMatrix Y;  // m x r2
  DenseMatrix X;  // r2 x n
  StageTimings elapsed;
};

struct NystromResult {
  DenseMatrix C;  // n x r2
  DenseMatrix W;  // r2 x r2, symmetric psd
  StageTimings elapsed;
};

/// Incremental evaluation of (M M^T)^q M Omega: one step() applies M^T then
/// M. In stabilized mode the block is re-orthonormalized after every step,
/// so current() spans the same space with better conditioning.
class SubspaceIteration {
 public:
  /// `op` is borrowed and must outlive the iteration.
  SubspaceIteration(const DenseMatrix& op, const DenseMatrix& omega, bool stabilized);

  const DenseMatrix& current() const noexcept { return block_; }
  std::size_t power() const noexcept { return power_; }
  void step();

 private:
  const DenseMatrix* op_;
  DenseMatrix block_;
  std::size_t power_ = 0;
  bool stabilized_;
};

/// Incremental evaluation of W^q Omega for symmetric W (Nystrom variant).
class SymmetricPowerIteration {
 public:
  SymmetricPowerIteration(const DenseMatrix& w, const DenseMatrix& omega, bool stabilized);

  const DenseMatrix& current() const noexcept { return block_; }
  std::size_t power() const noexcept { return power_; }
  void step();

 private:
  const DenseMatrix* w_;
  DenseMatrix block_;
  std::size_t power_ = 0;
  bool stabilized_;
};

/// (A~ A~^T)^q A~ Omega, never forming A~ A~^T.
DenseMatrix power_iterate(const DenseMatrix& atil, const DenseMatrix& omega, std::size_t q,
                          bool stabilized);

/// The primary sketch of `spec` for input dimension n.
sketch::SketchOperator primary_sketch(const RangeFinderSpec& spec, std::size_t n);
/// The regression sketch S2 of `spec` on m rows.
sketch::SketchOperator regression_sketch(const RangeFinderSpec& spec, std::size_t m);
/// The r1 x r2 starting block of `spec`.
DenseMatrix starting_block(const RangeFinderSpec& spec, std::size_t r1);

/// Q = orth((A S (A S)^T)^q A S Omega).
DenseMatrix range_finder_sketched(const DenseMatrix& a, const RangeFinderSpec& spec,
                                  StageTimings* elapsed = nullptr);

/// Classical range finder: the sketched one with S = I, Omega Gaussian n x r2
/// drawn from the same seed stream.
DenseMatrix range_finder_classical(const DenseMatrix& a, std::size_t k, std::size_t r2,
                                   std::size_t q, std::uint64_t seed, bool stabilized = true);

/// U Sigma V^T = Q Q^T A through the SVD of Q^T A.
linalg::SvdResult randsvd(const DenseMatrix& a, const DenseMatrix& q);

/// Y = (A S1 (A S1)^T)^q A S1 Omega,  X = (S2^T Y)^+ (S2^T A).
FactorizationResult lowrank_factorize(const DenseMatrix& a, const RangeFinderSpec& spec);

/// Sketch-powered Nystrom approximation of a symmetric psd A:
/// C~ = A S, W~ = S^T C~, Y = W~^q Omega, C = C~ Y, W = Y^T W~ Y.
/// Throws NumericalError when A is not symmetric psd within 1e-8.
NystromResult nystrom_psd(const DenseMatrix& a, const RangeFinderSpec& spec,
                          bool check_input = true);

/// C W^+ C^T, symmetrized.
DenseMatrix nystrom_reconstruct(const NystromResult& result);

/// Smallest q with q >= ln(2 m_hat) / (2 eps).
std::size_t choose_q(double eps, std::size_t m_hat);

}  // namespace skpower::power
