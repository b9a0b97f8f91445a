#include <algorithm>
#include <cstdint>

#include "skpower/kernels.hpp"

namespace skpower::kernels {
namespace {

constexpr std::size_t kRowTile = 64;
constexpr std::size_t kColTile = 256;
constexpr std::size_t kDepthTile = 256;

std::int64_t tiles(std::size_t extent, std::size_t tile) {
  return static_cast<std::int64_t>((extent + tile - 1) / tile);
}

inline void axpy(double alpha, const double* __restrict x, double* __restrict y, std::size_t n) {
#pragma omp simd
  for (std::size_t j = 0; j < n; ++j) y[j] += alpha * x[j];
}

inline double dot(const double* __restrict x, const double* __restrict y, std::size_t n) {
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s += x[j] * y[j];
  return s;
}

}  // namespace

// Each C(i, j) accumulates over p in increasing order regardless of tiling;
// tiles of C are owned by a single thread.
DenseMatrix gemm_nn(const DenseMatrix& a, const DenseMatrix& b) {
  const std::size_t m = a.rows(), depth = a.cols(), n = b.cols();
  DenseMatrix c(m, n);
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* pc = c.data().data();
  const std::int64_t ti = tiles(m, kRowTile), tj = tiles(n, kColTile);
#pragma omp parallel for collapse(2) schedule(static)
  for (std::int64_t it = 0; it < ti; ++it) {
    for (std::int64_t jt = 0; jt < tj; ++jt) {
      const std::size_t i0 = static_cast<std::size_t>(it) * kRowTile, i1 = std::min(m, i0 + kRowTile);
      const std::size_t j0 = static_cast<std::size_t>(jt) * kColTile, j1 = std::min(n, j0 + kColTile);
      for (std::size_t p0 = 0; p0 < depth; p0 += kDepthTile) {
        const std::size_t p1 = std::min(depth, p0 + kDepthTile);
        for (std::size_t i = i0; i < i1; ++i) {
          double* crow = pc + i * n + j0;
          const double* arow = pa + i * depth;
          for (std::size_t p = p0; p < p1; ++p) {
            const double alpha = arow[p];
            if (alpha != 0.0) axpy(alpha, pb + p * n + j0, crow, j1 - j0);
          }
        }
      }
    }
  }
  return c;
}

DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b) {
  const std::size_t depth = a.rows(), m = a.cols(), n = b.cols();
  DenseMatrix c(m, n);
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* pc = c.data().data();
  const std::int64_t ti = tiles(m, kRowTile), tj = tiles(n, kColTile);
#pragma omp parallel for collapse(2) schedule(static)
  for (std::int64_t it = 0; it < ti; ++it) {
    for (std::int64_t jt = 0; jt < tj; ++jt) {
      const std::size_t i0 = static_cast<std::size_t>(it) * kRowTile, i1 = std::min(m, i0 + kRowTile);
      const std::size_t j0 = static_cast<std::size_t>(jt) * kColTile, j1 = std::min(n, j0 + kColTile);
      for (std::size_t p = 0; p < depth; ++p) {
        const double* arow = pa + p * m;
        const double* brow = pb + p * n + j0;
        for (std::size_t i = i0; i < i1; ++i) {
          const double alpha = arow[i];
          if (alpha != 0.0) axpy(alpha, brow, pc + i * n + j0, j1 - j0);
        }
      }
    }
  }
  return c;
}

DenseMatrix gemm_nt(const DenseMatrix& a, const DenseMatrix& b) { return gemm_nn(a, b.transposed()); }

void gemv(const DenseMatrix& a, std::span<const double> x, std::span<double> y) {
  const std::size_t m = a.rows(), n = a.cols();
  const double* pa = a.data().data();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(m); ++i) {
    y[static_cast<std::size_t>(i)] = dot(pa + static_cast<std::size_t>(i) * n, x.data(), n);
  }
}

void gemv_t(const DenseMatrix& a, std::span<const double> x, std::span<double> y) {
  const std::size_t m = a.rows(), n = a.cols();
  const double* pa = a.data().data();
  std::fill(y.begin(), y.end(), 0.0);
  const std::int64_t tj = tiles(n, kColTile);
#pragma omp parallel for schedule(static)
  for (std::int64_t jt = 0; jt < tj; ++jt) {
    const std::size_t j0 = static_cast<std::size_t>(jt) * kColTile, j1 = std::min(n, j0 + kColTile);
    for (std::size_t i = 0; i < m; ++i) {
      if (x[i] != 0.0) axpy(x[i], pa + i * n + j0, y.data() + j0, j1 - j0);
    }
  }
}

void fwht(std::span<double> v) {
  const std::size_t n = v.size();
  double* d = v.data();
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += 2 * h) {
#pragma omp simd
      for (std::size_t j = i; j < i + h; ++j) {
        const double x = d[j], y = d[j + h];
        d[j] = x + y;
        d[j + h] = x - y;
      }
    }
  }
}

void fwht_rows(std::span<double> data, std::size_t count, std::size_t len) {
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < static_cast<std::int64_t>(count); ++r) {
    fwht(data.subspan(static_cast<std::size_t>(r) * len, len));
  }
}

void fwht_columns(std::span<double> data, std::size_t len, std::size_t width) {
  double* d = data.data();
  const std::int64_t tj = tiles(width, kColTile);
#pragma omp parallel for schedule(static)
  for (std::int64_t jt = 0; jt < tj; ++jt) {
    const std::size_t j0 = static_cast<std::size_t>(jt) * kColTile;
    const std::size_t w = std::min(width, j0 + kColTile) - j0;
    for (std::size_t h = 1; h < len; h <<= 1) {
      for (std::size_t i = 0; i < len; i += 2 * h) {
        for (std::size_t r = i; r < i + h; ++r) {
          double* top = d + r * width + j0;
          double* bot = d + (r + h) * width + j0;
#pragma omp simd
          for (std::size_t j = 0; j < w; ++j) {
            const double x = top[j], y = bot[j];
            top[j] = x + y;
            bot[j] = x - y;
          }
        }
      }
    }
  }
}

}  // namespace skpower::kernels
