#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skpower/dense_matrix.hpp"

namespace skpower::sketch {

enum class SketchFamily {
  Gaussian,     // i.i.d. N(0, 1/r)
  Sign,         // i.i.d. +-1/sqrt(r)
  CountSketch,  // s non-zeros of +-1/sqrt(s) per row
  Srht,         // (1/sqrt r) D H I_{:,T}
  Identity,     // S = I_n; baseline and test hook, requires r == n
};

struct SketchKind {
  SketchFamily family = SketchFamily::Gaussian;
  /// Non-zeros per row; only meaningful for CountSketch.
  std::size_t nnz_per_row = 1;

  static SketchKind gaussian() { return {SketchFamily::Gaussian, 1}; }
  static SketchKind sign() { return {SketchFamily::Sign, 1}; }
  static SketchKind count_sketch(std::size_t s) { return {SketchFamily::CountSketch, s}; }
  static SketchKind srht() { return {SketchFamily::Srht, 1}; }
  static SketchKind identity() { return {SketchFamily::Identity, 1}; }

  bool operator==(const SketchKind&) const = default;
};

/// "gaussian", "sign", "countsketch", "srht", "identity".
std::string family_name(SketchFamily family);
SketchFamily parse_family(std::string_view name);
std::string to_string(const SketchKind& kind);

/// Implied entries before densification; above this densify() refuses.
inline constexpr std::size_t kDensifyCap = 10'000'000;

/// Seeded, immutable random linear map from R^n to R^r, held as the implied
/// n x r matrix S.
///
/// Storage is family-specific: Gaussian and Sign keep the explicit matrix,
/// CountSketch keeps s (column, value) pairs per row, and Srht keeps the sign
/// diagonal plus the sampled column subset of the padded Hadamard matrix.
/// Identical (kind, n, r, seed) always produce the identical operator.
class SketchOperator {
 public:
  SketchOperator(SketchKind kind, std::size_t n, std::size_t r, std::uint64_t seed);

  const SketchKind& kind() const noexcept { return kind_; }
  std::size_t input_dim() const noexcept { return n_; }
  std::size_t sketch_dim() const noexcept { return r_; }
  std::uint64_t seed() const noexcept { return seed_; }
  /// Hadamard order for Srht (next power of two >= n); n otherwise.
  std::size_t padded_dim() const noexcept { return n_pad_; }

  /// A * S, shape (A.rows x r). Throws DimensionMismatch unless A.cols == n.
  DenseMatrix apply_right(const DenseMatrix& a) const;
  /// S^T * A, shape (r x A.cols). Throws DimensionMismatch unless A.rows == n.
  DenseMatrix apply_left_transpose(const DenseMatrix& a) const;
  /// The explicit n x r matrix.
  DenseMatrix densify() const;

  // CountSketch layout: row j owns entries [j*s, (j+1)*s).
  std::span<const std::uint32_t> nonzero_columns() const noexcept { return columns_; }
  std::span<const double> nonzero_values() const noexcept { return values_; }

  // Srht layout.
  std::span<const double> sign_diagonal() const noexcept { return signs_; }
  std::span<const std::uint32_t> sampled_columns() const noexcept { return sampled_; }

 private:
  DenseMatrix countsketch_right(const DenseMatrix& a) const;
  DenseMatrix countsketch_left_transpose(const DenseMatrix& a) const;
  DenseMatrix srht_right(const DenseMatrix& a) const;
  DenseMatrix srht_left_transpose(const DenseMatrix& a) const;

  SketchKind kind_;
  std::size_t n_ = 0;
  std::size_t r_ = 0;
  std::uint64_t seed_ = 0;
  std::size_t n_pad_ = 0;

  std::shared_ptr<const DenseMatrix> dense_;
  std::vector<std::uint32_t> columns_;
  std::vector<double> values_;
  std::vector<double> signs_;
  std::vector<std::uint32_t> sampled_;
};

SketchOperator make_sketch(SketchKind kind, std::size_t n, std::size_t r, std::uint64_t seed);

inline DenseMatrix apply_right(const DenseMatrix& a, const SketchOperator& s) {
  return s.apply_right(a);
}
inline DenseMatrix apply_left_transpose(const SketchOperator& s, const DenseMatrix& a) {
  return s.apply_left_transpose(a);
}
inline DenseMatrix densify(const SketchOperator& s) { return s.densify(); }

// -- sketch sizes -----------------------------------------------------------
//
// Sizing rules with the hidden O(.) constant exposed as `c`.
// These are heuristics to be calibrated against the regularized spectral
// approximation certifier, not guarantees. The CountSketch rules do not
// cover s = 1 (plain CountSketch); using it is allowed but outside theory.

/// Which of the two CountSketch (r, s) regimes to use.
enum class CountSketchRegime {
  A,  // r ~ (k + log(1/(eps delta)))/eps^2, s ~ log^2(k/delta)/eps + log^3(k/delta)
  B,  // r ~ k log(k/delta)/eps^2,          s ~ log(k/delta)/eps
};

struct SketchSize {
  std::size_t r = 0;
  /// Companion non-zeros per row (CountSketch only, 1 otherwise).
  std::size_t s = 1;
};

inline constexpr double kDefaultSizeConstant = 2.0;

/// Sketch size for target rank k at accuracy eps with failure probability
/// delta. `n` is the input dimension and is required for Srht only.
SketchSize sketch_size(SketchFamily family, std::size_t k, double eps, double delta,
                       double c = kDefaultSizeConstant,
                       CountSketchRegime regime = CountSketchRegime::B, std::size_t n = 0);

}  // namespace skpower::sketch
