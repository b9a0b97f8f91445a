#pragma once

#include <cstddef>
#include <span>

#include "skpower/dense_matrix.hpp"

// OpenMP-parallel dense kernels.
//
// Every output entry is produced by exactly one thread with a fixed
// accumulation order, so results are bitwise identical for any thread count.
// Shape checks live in the callers (linalg::matmul and friends); these
// functions assume conforming operands.
namespace skpower::kernels {

/// C = A * B.
DenseMatrix gemm_nn(const DenseMatrix& a, const DenseMatrix& b);

/// C = A^T * B.
DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b);

/// C = A * B^T.
DenseMatrix gemm_nt(const DenseMatrix& a, const DenseMatrix& b);

/// y = A * x
void gemv(const DenseMatrix& a, std::span<const double> x, std::span<double> y);

/// y = A^T * x
void gemv_t(const DenseMatrix& a, std::span<const double> x, std::span<double> y);

/// In-place unnormalized Walsh-Hadamard transform of a length-2^p vector.
void fwht(std::span<double> v);

/// Transforms each of the `count` contiguous rows of length `len` in `data`.
void fwht_rows(std::span<double> data, std::size_t count, std::size_t len);

/// Transforms along the row index of a row-major (len x width) block, i.e.
/// every column is transformed independently.
void fwht_columns(std::span<double> data, std::size_t len, std::size_t width);

}  // namespace skpower::kernels
