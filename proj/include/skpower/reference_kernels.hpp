#pragma once

#include <cstddef>
#include <span>

#include "skpower/dense_matrix.hpp"

// Serial textbook implementations of the kernels in kernels.hpp. Kept as
// test oracles and as the baseline for the kernel benchmark.
namespace skpower::kernels::reference {

DenseMatrix gemm_nn(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix gemm_nt(const DenseMatrix& a, const DenseMatrix& b);

/// Explicit Sylvester-Hadamard matrix of order n (power of two).
DenseMatrix hadamard(std::size_t n);

/// Walsh-Hadamard transform by explicit O(n^2) multiplication.
void hadamard_transform(std::span<double> v);

}  // namespace skpower::kernels::reference
