#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace skpower {

/// Row-major dense matrix of doubles.
///
/// Value type: copies are deep, moves are cheap. The constructors that take
/// caller data reject non-finite entries; kernels that write through the
/// mutable accessors are trusted to keep entries finite.
class DenseMatrix {
 public:
  DenseMatrix() = default;

  /// rows x cols matrix of zeros.
  DenseMatrix(std::size_t rows, std::size_t cols);

  /// Takes ownership of row-major `data`; throws if the length is not
  /// rows*cols or an entry is NaN/Inf.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(std::span<const double> diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  DenseMatrix transposed() const;

  /// Copy of the sub-block starting at (row0, col0).
  DenseMatrix block(std::size_t row0, std::size_t col0, std::size_t nrows, std::size_t ncols) const;
  DenseMatrix left_cols(std::size_t ncols) const { return block(0, 0, rows_, ncols); }

  /// True when every entry is finite.
  bool all_finite() const noexcept;

  /// Bitwise equality of shape and entries.
  bool operator==(const DenseMatrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace skpower
