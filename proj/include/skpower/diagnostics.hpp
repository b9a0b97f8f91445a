#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "skpower/dense_matrix.hpp"
#include "skpower/linalg.hpp"

namespace skpower::diag {

enum class ProfileKind {
  Singular,  // sigma_i; bounds are on squared norms and use sigma_i^2
  Eigen,     // lambda_i of a psd matrix; bounds are unsquared and use lambda_i
};

/// Descending non-negative spectrum of a matrix.
struct SpectralProfile {
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
  ProfileKind kind = ProfileKind::Singular;

  /// Validates ordering and sign; throws InvalidArgument otherwise.
  static SpectralProfile from_values(std::vector<double> values, ProfileKind kind,
                                     std::size_t rows = 0, std::size_t cols = 0);
  static SpectralProfile singular_values_of(const DenseMatrix& a);
  /// Eigenvalues of a symmetric psd matrix, tiny negatives clamped to zero.
  static SpectralProfile psd_eigenvalues_of(const DenseMatrix& a);

  std::size_t size() const noexcept { return values.size(); }
  /// values[i-1]: 1-based like the math.
  double operator[](std::size_t one_based) const { return values.at(one_based - 1); }
  /// Sum of values[i]^2 over 1-based i > k.
  double tail_sum_squares(std::size_t k) const;
  /// Sum of values[i] over 1-based i > k.
  double tail_sum(std::size_t k) const;
  /// Count of values above tol * values[0].
  std::size_t numerical_rank(double rel_tol = 1e-12) const;
};

/// Outcome of comparing a measured quantity to a bound. Calibrated
/// constants and parameters ride along in `params`.
struct BoundReport {
  std::string name;
  double rhs = 0.0;
  double measured = 0.0;
  bool holds = false;
  std::map<std::string, double> params;

  static BoundReport make(std::string name, double measured, double rhs,
                          std::map<std::string, double> params = {});

  nlohmann::json to_json() const;
  /// "name,rhs,measured,holds,params" with params as key=value;... .
  static std::string csv_header();
  std::string csv_row() const;
};

/// Regularization level (1/k) * sum_{i>k} sigma_i^2.
double lambda_k(const SpectralProfile& profile, std::size_t k);

/// Absolute slack certify() allows on the whitened error, which is O(1) in
/// scale; an exact sketch (AS = A) measures around 1e-15, not 0.
inline constexpr double kCertifyRoundoff = 1e-12;

/// Precomputed whitening (A A^T + lambda I)^{-1/2} for repeated certification
/// of sketches of one matrix.
///
/// whitened_error(AS) is
///   || (AA^T + lambda I)^{-1/2} (AS (AS)^T - AA^T) (AA^T + lambda I)^{-1/2} ||,
/// and AS is a lambda-regularized eps-spectral approximation of A iff that
/// value is at most eps.
class RegularizedWhitener {
 public:
  /// Throws NumericalError when lambda == 0 and A A^T is singular.
  RegularizedWhitener(const DenseMatrix& a, double lambda);

  double lambda() const noexcept { return lambda_; }
  std::size_t rows() const noexcept { return rows_; }
  double whitened_error(const DenseMatrix& sketched) const;
  BoundReport certify(const DenseMatrix& sketched, double eps) const;

 private:
  double lambda_;
  std::size_t rows_;
  DenseMatrix basis_;                // eigenvectors of A A^T
  std::vector<double> inv_sqrt_;     // (mu_i + lambda)^{-1/2}
  std::vector<double> whitened_gram_;  // mu_i / (mu_i + lambda)
};

/// Regularized spectral approximation certificate for a single sketch.
BoundReport check_reg_spectral_approx(const DenseMatrix& a, const DenseMatrix& sketched,
                                      double lambda, double eps);

/// Both norms of A - Q Q^T A. Throws NumericalError when Q is not
/// orthonormal within 1e-6.
linalg::MatrixNorms residuals(const DenseMatrix& a, const DenseMatrix& q);

/// Both norms of A - Y X, spectral norm from a full SVD of the residual.
linalg::MatrixNorms factorization_residuals(const DenseMatrix& a, const DenseMatrix& y,
                                            const DenseMatrix& x);

/// ||A - Y X|| by Lanczos on the residual's Gram operator, stopping once the
/// top Ritz value is converged to `rel_tol`. Matrix-free in the residual.
double estimate_residual_spectral(const DenseMatrix& a, const DenseMatrix& y,
                                  const DenseMatrix& x, double rel_tol = 1e-6,
                                  std::uint64_t seed = 0x5eed);

/// (1 + eps) v_{k+1}^p + (eps / l) sum_{i>l} v_i^p, with p = 2 for singular
/// profiles (bound on the squared spectral error) and p = 1 for eigenvalue
/// profiles (bound on the unsquared error).
double bound_thm_main(const SpectralProfile& profile, std::size_t k, std::size_t l, double eps);

struct SquaredBounds {
  double spectral_sq = 0.0;
  double frobenius_sq = 0.0;
};

/// ((2/k) sum_{i>k} sigma_i^2, 4 sum_{i>k} sigma_i^2)
SquaredBounds bound_lemma2(const SpectralProfile& profile, std::size_t k);

/// Two-stage bounds for Q = orth(B Omega), B = (AS (AS)^T)^q AS:
///   spectral_sq  = (1 + 2 eps) ((2 lambda2)^{1/(2q+1)} + eps lambda1)
///   frobenius_sq = min_r 8 r (lambda2^{1/(2q+1)} + lambda1) + sum_{i>r} sigma_i^2
SquaredBounds bound_main_technical(double lambda1, double lambda2, double eps, std::size_t q,
                                   const SpectralProfile& profile);

/// Same bounds taking lambda2^{1/(2q+1)} directly, for lambda2 values that
/// overflow a double.
SquaredBounds bound_main_technical_from_root(double lambda1, double lambda2_root, double eps,
                                             std::size_t q, const SpectralProfile& profile);

/// lambda2^{1/(2q+1)} for lambda2 = (1/k) sum_{i>k} sigma_i(AS)^{2(2q+1)},
/// evaluated in the log domain.
double lambda2_root(const SpectralProfile& sketched, std::size_t k, std::size_t q);

/// (2 lambda2)^{1/(2q+1)}, the left side of the lambda2 estimate.
double lambda2_estimate_lhs(const SpectralProfile& sketched, std::size_t k, std::size_t q);

/// Compares (2 lambda2)^{1/(2q+1)} against
/// (1 + 4 eps) sigma_{k+1}(A)^2 + 2 lambda1 eps. Requires
/// q >= choose_q(eps, rank(AS)).
BoundReport bound_lambda2_estimate(const SpectralProfile& sketched,
                                   const SpectralProfile& profile, std::size_t k,
                                   std::size_t q, double lambda1, double eps);

/// residual / sigma_{k+1} - 1. Throws NumericalError when sigma_{k+1} == 0.
double relative_error(double residual_spectral, std::size_t k, const SpectralProfile& profile);

/// relative_error when sigma_{k+1} > rel_tol * sigma_1; otherwise A is
/// numerically rank <= k and the normalized residual residual / sigma_1 is
/// returned instead. `normalized` reports which branch was taken.
double relative_error_guarded(double residual_spectral, std::size_t k,
                              const SpectralProfile& profile, bool* normalized = nullptr,
                              double rel_tol = 1e-12);

}  // namespace skpower::diag
