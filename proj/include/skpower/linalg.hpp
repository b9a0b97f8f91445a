#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "skpower/dense_matrix.hpp"

namespace skpower::linalg {

/// Thin singular value decomposition A = U * diag(sigma) * V^T with
/// p = min(m, n) columns in U and V and sigma sorted descending.
struct SvdResult {
  DenseMatrix U;
  std::vector<double> sigma;
  DenseMatrix V;
};

struct MatrixNorms {
  double spectral = 0.0;
  double frobenius = 0.0;
};

/// Eigenpairs of a symmetric matrix, eigenvalues sorted descending; column i
/// of `vectors` belongs to `values[i]`.
struct SymmetricEigen {
  std::vector<double> values;
  DenseMatrix vectors;
};

// -- products ---------------------------------------------------------------

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
/// A^T * B without forming A^T.
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);
/// A * B^T without forming B^T.
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);

/// A * diag(d), scaling column j by d[j].
DenseMatrix scale_columns(const DenseMatrix& a, std::span<const double> d);

// -- elementwise ------------------------------------------------------------

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix scaled(const DenseMatrix& a, double factor);
/// (A + A^T) / 2
DenseMatrix symmetrized(const DenseMatrix& a);

double max_abs(const DenseMatrix& a);
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);
bool is_symmetric(const DenseMatrix& a, double rel_tol);

/// ||Q^T Q - I||_max
double orthonormality_error(const DenseMatrix& q);

// -- decompositions ---------------------------------------------------------

/// Numerical-rank tolerance used when a caller passes none:
/// max(rows, cols) * machine epsilon (relative to the largest pivot or
/// singular value).
double default_rank_tolerance(std::size_t rows, std::size_t cols);

/// Orthonormal basis of range(Y) by QR with column pivoting. Columns whose
/// pivot falls below tol * (largest pivot) are dropped, so the result may be
/// narrower than Y. Throws NumericalError for an all-zero Y.
DenseMatrix orthonormalize(const DenseMatrix& y, std::optional<double> tol = std::nullopt);

SvdResult thin_svd(const DenseMatrix& a);
std::vector<double> singular_values(const DenseMatrix& a);

/// Moore-Penrose pseudoinverse via thin_svd; singular values at or below
/// rel_tol * sigma_max count as zero.
DenseMatrix pinv(const DenseMatrix& m, std::optional<double> rel_tol = std::nullopt);

SymmetricEigen symmetric_eigen(const DenseMatrix& a);
std::vector<double> symmetric_eigenvalues(const DenseMatrix& a);

/// Principal square root of a symmetric psd matrix. Eigenvalues in
/// [-1e-10 ||A||, 0) are clamped to zero; anything more negative, or an
/// asymmetric input, throws NumericalError.
DenseMatrix psd_sqrt(const DenseMatrix& a);

// -- norms ------------------------------------------------------------------

double frobenius_norm(const DenseMatrix& a);
double spectral_norm(const DenseMatrix& a);
MatrixNorms norms(const DenseMatrix& a);

}  // namespace skpower::linalg
