#include "skpower/dense_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "skpower/error.hpp"

namespace skpower {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw InvalidArgument("DenseMatrix: expected " + std::to_string(rows * cols) +
                          " entries, got " + std::to_string(data_.size()));
  }
  if (!all_finite()) throw InvalidArgument("DenseMatrix: non-finite entry");
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw InvalidArgument("DenseMatrix::from_rows: ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return DenseMatrix(r, c, std::move(data));
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> diag) {
  DenseMatrix out(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) {
    if (!std::isfinite(diag[i])) throw InvalidArgument("DenseMatrix::diagonal: non-finite entry");
    out(i, i) = diag[i];
  }
  return out;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix out(cols_, rows_);
  constexpr std::size_t kTile = 32;
  for (std::size_t i0 = 0; i0 < rows_; i0 += kTile) {
    const std::size_t i1 = std::min(rows_, i0 + kTile);
    for (std::size_t j0 = 0; j0 < cols_; j0 += kTile) {
      const std::size_t j1 = std::min(cols_, j0 + kTile);
      for (std::size_t i = i0; i < i1; ++i) {
        for (std::size_t j = j0; j < j1; ++j) out.data_[j * rows_ + i] = data_[i * cols_ + j];
      }
    }
  }
  return out;
}

DenseMatrix DenseMatrix::block(std::size_t row0, std::size_t col0, std::size_t nrows,
                               std::size_t ncols) const {
  if (row0 + nrows > rows_ || col0 + ncols > cols_) {
    throw DimensionMismatch("DenseMatrix::block: out of range");
  }
  DenseMatrix out(nrows, ncols);
  for (std::size_t i = 0; i < nrows; ++i) {
    const double* src = data_.data() + (row0 + i) * cols_ + col0;
    std::copy(src, src + ncols, out.data_.data() + i * ncols);
  }
  return out;
}

bool DenseMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace skpower
