#include "skpower/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "eigen_bridge.hpp"
#include "skpower/error.hpp"
#include "skpower/kernels.hpp"

namespace skpower::linalg {
namespace {

using detail::to_dense;
using detail::view;

std::string shape(const DenseMatrix& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch(std::string(what) + ": " + shape(a) + " vs " + shape(b));
  }
}

}  // namespace

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matmul: " + shape(a) + " * " + shape(b));
  return kernels::gemm_nn(a, b);
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw DimensionMismatch("matmul_tn: " + shape(a) + "^T * " + shape(b));
  return kernels::gemm_tn(a, b);
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.cols()) throw DimensionMismatch("matmul_nt: " + shape(a) + " * " + shape(b) + "^T");
  return kernels::gemm_nt(a, b);
}

DenseMatrix scale_columns(const DenseMatrix& a, std::span<const double> d) {
  if (d.size() != a.cols()) throw DimensionMismatch("scale_columns: length mismatch");
  DenseMatrix out = a;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto row = out.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) row[j] *= d[j];
  }
  return out;
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "add");
  DenseMatrix out = a;
  auto o = out.data();
  auto q = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += q[i];
  return out;
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "subtract");
  DenseMatrix out = a;
  auto o = out.data();
  auto q = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] -= q[i];
  return out;
}

DenseMatrix scaled(const DenseMatrix& a, double factor) {
  DenseMatrix out = a;
  for (double& v : out.data()) v *= factor;
  return out;
}

DenseMatrix symmetrized(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("symmetrized: not square " + shape(a));
  DenseMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = 0.5 * (a(i, j) + a(j, i));
  }
  return out;
}

double max_abs(const DenseMatrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  auto x = a.data();
  auto y = b.data();
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

bool is_symmetric(const DenseMatrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(max_abs(a), std::numeric_limits<double>::min());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = i + 1; j < a.cols(); ++j) {
      if (std::abs(a(i, j) - a(j, i)) > rel_tol * scale) return false;
    }
  }
  return true;
}

double orthonormality_error(const DenseMatrix& q) {
  DenseMatrix g = matmul_tn(q, q);
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) -= 1.0;
  return max_abs(g);
}

double default_rank_tolerance(std::size_t rows, std::size_t cols) {
  return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon();
}

DenseMatrix orthonormalize(const DenseMatrix& y, std::optional<double> tol) {
  if (y.empty()) throw InvalidArgument("orthonormalize: empty input");
  if (max_abs(y) == 0.0) throw NumericalError("orthonormalize: input is all zero");
  const double t = tol.value_or(default_rank_tolerance(y.rows(), y.cols()));
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(view(y));
  const auto& r = qr.matrixR();
  const Eigen::Index diag = std::min(r.rows(), r.cols());
  const double top = std::abs(r(0, 0));
  Eigen::Index rank = 0;
  while (rank < diag && std::abs(r(rank, rank)) > t * top) ++rank;
  if (rank == 0) throw NumericalError("orthonormalize: numerical rank zero");
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(r.rows(), rank);
  q.applyOnTheLeft(qr.householderQ());
  return to_dense(q);
}

SvdResult thin_svd(const DenseMatrix& a) {
  if (a.empty()) throw InvalidArgument("thin_svd: empty input");
  if (!a.all_finite()) throw NumericalError("thin_svd: non-finite input");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(view(a), Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdResult out;
  out.U = to_dense(svd.matrixU());
  out.V = to_dense(svd.matrixV());
  const auto& s = svd.singularValues();
  out.sigma.assign(s.data(), s.data() + s.size());
  return out;
}

std::vector<double> singular_values(const DenseMatrix& a) {
  if (a.empty()) throw InvalidArgument("singular_values: empty input");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(view(a));
  const auto& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

DenseMatrix pinv(const DenseMatrix& m, std::optional<double> rel_tol) {
  const SvdResult svd = thin_svd(m);
  const double t = rel_tol.value_or(default_rank_tolerance(m.rows(), m.cols()));
  const double cutoff = svd.sigma.empty() ? 0.0 : t * svd.sigma.front();
  // pinv = V diag(1/sigma) U^T over the retained singular triplets.
  std::size_t rank = 0;
  while (rank < svd.sigma.size() && svd.sigma[rank] > cutoff) ++rank;
  DenseMatrix out(m.cols(), m.rows());
  if (rank == 0) return out;
  DenseMatrix vs(m.cols(), rank);
  for (std::size_t i = 0; i < m.cols(); ++i) {
    for (std::size_t j = 0; j < rank; ++j) vs(i, j) = svd.V(i, j) / svd.sigma[j];
  }
  return matmul_nt(vs, svd.U.left_cols(rank));
}

SymmetricEigen symmetric_eigen(const DenseMatrix& a) {
  if (a.rows() != a.cols() || a.empty()) throw DimensionMismatch("symmetric_eigen: not square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(view(a));
  if (es.info() != Eigen::Success) throw NumericalError("symmetric_eigen: did not converge");
  const Eigen::Index n = es.eigenvalues().size();
  SymmetricEigen out;
  out.values.resize(static_cast<std::size_t>(n));
  out.vectors = DenseMatrix(a.rows(), a.cols());
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index src = n - 1 - j;
    out.values[static_cast<std::size_t>(j)] = es.eigenvalues()(src);
    for (Eigen::Index i = 0; i < n; ++i) {
      out.vectors(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = es.eigenvectors()(i, src);
    }
  }
  return out;
}

std::vector<double> symmetric_eigenvalues(const DenseMatrix& a) {
  if (a.rows() != a.cols() || a.empty()) throw DimensionMismatch("symmetric_eigenvalues: not square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(view(a), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("symmetric_eigenvalues: did not converge");
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::reverse(out.begin(), out.end());
  return out;
}

DenseMatrix psd_sqrt(const DenseMatrix& a) {
  if (!is_symmetric(a, 1e-10)) throw NumericalError("psd_sqrt: input is not symmetric");
  SymmetricEigen es = symmetric_eigen(symmetrized(a));
  double scale = 0.0;
  for (double v : es.values) scale = std::max(scale, std::abs(v));
  for (double& v : es.values) {
    if (v < -1e-10 * scale) throw NumericalError("psd_sqrt: input is indefinite");
    v = std::sqrt(std::max(v, 0.0));
  }
  const DenseMatrix scaled_vectors = scale_columns(es.vectors, es.values);
  return symmetrized(matmul_nt(scaled_vectors, es.vectors));
}

double frobenius_norm(const DenseMatrix& a) {
  // Scaled accumulation keeps large entries from overflowing the sum.
  const double m = max_abs(a);
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (double v : a.data()) {
    const double x = v / m;
    s += x * x;
  }
  return m * std::sqrt(s);
}

double spectral_norm(const DenseMatrix& a) {
  if (a.empty()) return 0.0;
  return singular_values(a).front();
}

MatrixNorms norms(const DenseMatrix& a) { return {spectral_norm(a), frobenius_norm(a)}; }

}  // namespace skpower::linalg
