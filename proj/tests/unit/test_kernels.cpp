#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "oracles.hpp"
#include "skpower/kernels.hpp"
#include "skpower/reference_kernels.hpp"
#include "skpower/threads.hpp"

namespace skpower {
namespace {

using testing::for_all;
using testing::Gen;
namespace ref = kernels::reference;

TEST(Kernels, GemmVariantsAgreeWithReference) {
  for_all(12, 21, [](Gen& g) {
    // Shapes straddle the tile sizes.
    const std::size_t m = g.dim(1, 150), k = g.dim(1, 600), n = g.dim(1, 300);
    const DenseMatrix a = g.matrix(m, k), b = g.matrix(k, n);
    const DenseMatrix want = ref::gemm_nn(a, b);
    const double tol = 1e-12 * (1.0 + testing::frobenius(want));
    EXPECT_LE(testing::max_abs_diff(kernels::gemm_nn(a, b), want), tol);
    EXPECT_LE(testing::max_abs_diff(kernels::gemm_tn(a.transposed(), b), want), tol);
    EXPECT_LE(testing::max_abs_diff(kernels::gemm_nt(a, b.transposed()), want), tol);
    EXPECT_LE(testing::max_abs_diff(ref::gemm_tn(a.transposed(), b), want), tol);
    EXPECT_LE(testing::max_abs_diff(ref::gemm_nt(a, b.transposed()), want), tol);
  });
}

TEST(Kernels, BitwiseIndependentOfThreadCount) {
  Gen g(22);
  const DenseMatrix a = g.matrix(130, 520), b = g.matrix(520, 270);
  DenseMatrix one, many, one_tn, many_tn;
  {
    ScopedThreadLimit limit(1);
    one = kernels::gemm_nn(a, b);
    one_tn = kernels::gemm_tn(b, b);
  }
  {
    ScopedThreadLimit limit(4);
    many = kernels::gemm_nn(a, b);
    many_tn = kernels::gemm_tn(b, b);
  }
  EXPECT_EQ(one, many);
  EXPECT_EQ(one_tn, many_tn);
}

TEST(Kernels, GemvMatchesOracle) {
  for_all(10, 23, [](Gen& g) {
    const std::size_t m = g.dim(1, 300), n = g.dim(1, 300);
    const DenseMatrix a = g.matrix(m, n);
    const DenseMatrix x = g.matrix(n, 1), xt = g.matrix(m, 1);
    std::vector<double> y(m), yt(n);
    kernels::gemv(a, x.data(), y);
    kernels::gemv_t(a, xt.data(), yt);
    const DenseMatrix want = testing::naive_matmul(a, x);
    const DenseMatrix want_t = testing::naive_matmul(a.transposed(), xt);
    for (std::size_t i = 0; i < m; ++i) EXPECT_NEAR(y[i], want(i, 0), 1e-12 * (1 + std::abs(want(i, 0))) * n);
    for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(yt[j], want_t(j, 0), 1e-12 * (1 + std::abs(want_t(j, 0))) * m);
  });
}

TEST(Kernels, HadamardIsOrthogonalUpToScale) {
  for (std::size_t n : {1u, 2u, 8u, 64u}) {
    const DenseMatrix h = ref::hadamard(n);
    const DenseMatrix hh = testing::naive_matmul(h, h.transposed());
    EXPECT_EQ(hh, [&] {
      DenseMatrix d = DenseMatrix::identity(n);
      for (std::size_t i = 0; i < n; ++i) d(i, i) = static_cast<double>(n);
      return d;
    }());
  }
}

TEST(Kernels, FwhtMatchesExplicitTransform) {
  for_all(8, 24, [](Gen& g) {
    const std::size_t n = std::size_t{1} << g.dim(0, 10);
    DenseMatrix v = g.matrix(1, n);
    std::vector<double> fast(v.data().begin(), v.data().end());
    std::vector<double> slow = fast;
    kernels::fwht(fast);
    ref::hadamard_transform(slow);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(fast[i], slow[i], 1e-11 * std::sqrt(double(n)));
    // H H = n I
    kernels::fwht(fast);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(fast[i] / n, v(0, i), 1e-12);
  });
}

TEST(Kernels, FwhtRowsAndColumnsTransformIndependently) {
  Gen g(25);
  const std::size_t len = 32, count = 7;
  DenseMatrix rows = g.matrix(count, len);
  DenseMatrix cols = rows.transposed();  // len x count
  DenseMatrix want = rows;
  for (std::size_t r = 0; r < count; ++r) kernels::fwht(want.row(r));
  kernels::fwht_rows(rows.data(), count, len);
  kernels::fwht_columns(cols.data(), len, count);
  EXPECT_EQ(rows, want);
  EXPECT_LE(testing::max_abs_diff(cols.transposed(), want), 1e-12);
}

}  // namespace
}  // namespace skpower
