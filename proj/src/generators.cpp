#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "eigen_bridge.hpp"
#include "skpower/data_io.hpp"
#include "skpower/error.hpp"
#include "skpower/linalg.hpp"
#include "skpower/rng.hpp"

namespace skpower::io {
namespace {

void require_dims(std::size_t m, std::size_t n, const char* what) {
  if (m < 1 || n < 1) throw InvalidArgument(std::string(what) + ": dimensions must be >= 1");
}

}  // namespace

DenseMatrix haar_orthonormal(std::size_t m, std::size_t p, std::uint64_t seed) {
  if (p > m) throw InvalidArgument("haar_orthonormal: need p <= m");
  const DenseMatrix g = gaussian_matrix(m, p, seed);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(detail::view(g));
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m),
                                                                    static_cast<Eigen::Index>(p));
  const auto& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(p); ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return detail::to_dense(q);
}

DenseMatrix gen_with_spectrum(std::size_t m, std::size_t n, const std::vector<double>& sigma,
                              std::uint64_t seed) {
  require_dims(m, n, "gen_with_spectrum");
  if (sigma.empty() || sigma.size() > std::min(m, n)) {
    throw InvalidArgument("gen_with_spectrum: spectrum length must be in [1, min(m, n)]");
  }
  const DenseMatrix u = haar_orthonormal(m, sigma.size(), derive_seed(seed, 0));
  const DenseMatrix v = haar_orthonormal(n, sigma.size(), derive_seed(seed, 1));
  return linalg::matmul_nt(linalg::scale_columns(u, sigma), v);
}

DenseMatrix gen_polydecay(std::size_t m, std::size_t n, std::uint64_t seed) {
  require_dims(m, n, "gen_polydecay");
  const auto top = static_cast<double>(std::max(m, n));
  std::vector<double> sigma(std::min(m, n));
  for (std::size_t i = 0; i < sigma.size(); ++i) sigma[i] = top / static_cast<double>(i + 1);
  return gen_with_spectrum(m, n, sigma, seed);
}

DenseMatrix gen_psd_polydecay(std::size_t n, std::uint64_t seed) {
  require_dims(n, n, "gen_psd_polydecay");
  std::vector<double> lambda(n);
  for (std::size_t i = 0; i < n; ++i) lambda[i] = static_cast<double>(n) / static_cast<double>(i + 1);
  const DenseMatrix u = haar_orthonormal(n, n, derive_seed(seed, 0));
  return linalg::symmetrized(linalg::matmul_nt(linalg::scale_columns(u, lambda), u));
}

DenseMatrix gen_expdecay(std::size_t m, std::size_t n, double rate, std::uint64_t seed) {
  require_dims(m, n, "gen_expdecay");
  if (!(rate >= 0.0) || !std::isfinite(rate)) throw InvalidArgument("gen_expdecay: rate must be >= 0");
  std::vector<double> sigma(std::min(m, n));
  for (std::size_t i = 0; i < sigma.size(); ++i) sigma[i] = std::exp(-rate * static_cast<double>(i));
  return gen_with_spectrum(m, n, sigma, seed);
}

DenseMatrix gen_lowrank_plus_noise(std::size_t m, std::size_t n, std::size_t r, double noise,
                                   std::uint64_t seed) {
  require_dims(m, n, "gen_lowrank_plus_noise");
  if (r < 1 || r > std::min(m, n)) throw InvalidArgument("gen_lowrank_plus_noise: need 1 <= r <= min(m, n)");
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw InvalidArgument("gen_lowrank_plus_noise: noise must be >= 0");
  DenseMatrix a = gen_with_spectrum(m, n, std::vector<double>(r, 1.0), seed);
  if (noise > 0.0) a = linalg::add(a, gaussian_matrix(m, n, derive_seed(seed, 2), noise));
  return a;
}

}  // namespace skpower::io
