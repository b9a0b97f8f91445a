#pragma once

#include <Eigen/Dense>

#include "skpower/dense_matrix.hpp"

namespace skpower::detail {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using MutMap = Eigen::Map<RowMajor>;

inline ConstMap view(const DenseMatrix& a) {
  return ConstMap(a.data().data(), static_cast<Eigen::Index>(a.rows()),
                  static_cast<Eigen::Index>(a.cols()));
}

inline MutMap view(DenseMatrix& a) {
  return MutMap(a.data().data(), static_cast<Eigen::Index>(a.rows()),
                static_cast<Eigen::Index>(a.cols()));
}

template <typename Derived>
DenseMatrix to_dense(const Eigen::MatrixBase<Derived>& m) {
  DenseMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  view(out) = m;
  return out;
}

}  // namespace skpower::detail
