#include <vector>

#include "skpower/error.hpp"
#include "skpower/reference_kernels.hpp"

namespace skpower::kernels::reference {

DenseMatrix gemm_nn(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < a.cols(); ++p) s += a(i, p) * b(p, j);
      c(i, j) = s;
    }
  }
  return c;
}

DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix c(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.cols(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < a.rows(); ++p) s += a(p, i) * b(p, j);
      c(i, j) = s;
    }
  }
  return c;
}

DenseMatrix gemm_nt(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < a.cols(); ++p) s += a(i, p) * b(j, p);
      c(i, j) = s;
    }
  }
  return c;
}

DenseMatrix hadamard(std::size_t n) {
  if (n == 0 || (n & (n - 1)) != 0) throw InvalidArgument("hadamard: order must be a power of two");
  DenseMatrix h(n, n);
  h(0, 0) = 1.0;
  for (std::size_t size = 1; size < n; size <<= 1) {
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t j = 0; j < size; ++j) {
        const double v = h(i, j);
        h(i, j + size) = v;
        h(i + size, j) = v;
        h(i + size, j + size) = -v;
      }
    }
  }
  return h;
}

void hadamard_transform(std::span<double> v) {
  const DenseMatrix h = hadamard(v.size());
  std::vector<double> out(v.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += h(i, j) * v[j];
  }
  std::copy(out.begin(), out.end(), v.begin());
}

}  // namespace skpower::kernels::reference
