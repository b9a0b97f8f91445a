#include "skpower/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "skpower/error.hpp"
#include "skpower/kernels.hpp"
#include "skpower/power_methods.hpp"
#include "skpower/rng.hpp"

namespace skpower::diag {
namespace {

void require_k(const SpectralProfile& p, std::size_t k, std::size_t max_k, const char* what) {
  if (k < 1 || k > max_k) {
    throw InvalidArgument(std::string(what) + ": k=" + std::to_string(k) + " outside [1, " +
                          std::to_string(max_k) + "] for a profile of length " +
                          std::to_string(p.size()));
  }
}

double power_of(double v, ProfileKind kind) { return kind == ProfileKind::Singular ? v * v : v; }

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

SpectralProfile SpectralProfile::from_values(std::vector<double> values, ProfileKind kind,
                                             std::size_t rows, std::size_t cols) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0) {
      throw InvalidArgument("SpectralProfile: value " + std::to_string(i) + " is negative or non-finite");
    }
    if (i > 0 && values[i] > values[i - 1]) {
      throw InvalidArgument("SpectralProfile: values are not sorted descending");
    }
  }
  return SpectralProfile{std::move(values), rows, cols, kind};
}

SpectralProfile SpectralProfile::singular_values_of(const DenseMatrix& a) {
  std::vector<double> s = linalg::singular_values(a);
  for (double& v : s) v = std::max(v, 0.0);
  std::sort(s.begin(), s.end(), std::greater<>());
  return from_values(std::move(s), ProfileKind::Singular, a.rows(), a.cols());
}

SpectralProfile SpectralProfile::psd_eigenvalues_of(const DenseMatrix& a) {
  std::vector<double> ev = linalg::symmetric_eigenvalues(linalg::symmetrized(a));
  const double scale = std::max(std::abs(ev.front()), std::abs(ev.back()));
  for (double& v : ev) {
    if (v < -1e-8 * scale) throw NumericalError("psd_eigenvalues_of: matrix is indefinite");
    v = std::max(v, 0.0);
  }
  return from_values(std::move(ev), ProfileKind::Eigen, a.rows(), a.cols());
}

double SpectralProfile::tail_sum_squares(std::size_t k) const {
  double s = 0.0;
  for (std::size_t i = k; i < values.size(); ++i) s += values[i] * values[i];
  return s;
}

double SpectralProfile::tail_sum(std::size_t k) const {
  double s = 0.0;
  for (std::size_t i = k; i < values.size(); ++i) s += values[i];
  return s;
}

std::size_t SpectralProfile::numerical_rank(double rel_tol) const {
  if (values.empty() || values.front() == 0.0) return 0;
  const double cut = rel_tol * values.front();
  return static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [cut](double v) { return v > cut; }));
}

BoundReport BoundReport::make(std::string name, double measured, double rhs,
                              std::map<std::string, double> params) {
  return BoundReport{std::move(name), rhs, measured, measured <= rhs, std::move(params)};
}

nlohmann::json BoundReport::to_json() const {
  return nlohmann::json{{"name", name}, {"rhs", rhs}, {"measured", measured}, {"holds", holds},
                        {"params", params}};
}

std::string BoundReport::csv_header() { return "name,rhs,measured,holds,params"; }

std::string BoundReport::csv_row() const {
  std::ostringstream os;
  os.precision(17);
  os << name << ',' << rhs << ',' << measured << ',' << (holds ? 1 : 0) << ',';
  bool first = true;
  for (const auto& [key, value] : params) {
    if (!first) os << ';';
    os << key << '=' << value;
    first = false;
  }
  return os.str();
}

double lambda_k(const SpectralProfile& profile, std::size_t k) {
  require_k(profile, k, profile.size(), "lambda_k");
  return profile.tail_sum_squares(k) / static_cast<double>(k);
}

RegularizedWhitener::RegularizedWhitener(const DenseMatrix& a, double lambda)
    : lambda_(lambda), rows_(a.rows()) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("whitener: lambda must be >= 0");
  linalg::SymmetricEigen es = linalg::symmetric_eigen(linalg::symmetrized(linalg::matmul_nt(a, a)));
  const double top = std::max(es.values.front(), 0.0);
  const double singular_cut =
      linalg::default_rank_tolerance(a.rows(), a.cols()) * top;
  inv_sqrt_.resize(es.values.size());
  whitened_gram_.resize(es.values.size());
  for (std::size_t i = 0; i < es.values.size(); ++i) {
    const double mu = std::max(es.values[i], 0.0);
    if (lambda == 0.0 && mu <= singular_cut) {
      throw NumericalError("whitener: lambda = 0 with a singular A A^T; whitening is undefined");
    }
    inv_sqrt_[i] = 1.0 / std::sqrt(mu + lambda);
    whitened_gram_[i] = mu / (mu + lambda);
  }
  basis_ = std::move(es.vectors);
}

double RegularizedWhitener::whitened_error(const DenseMatrix& sketched) const {
  if (sketched.rows() != rows_) throw DimensionMismatch("whitened_error: AS rows != A rows");
  // In the eigenbasis of A A^T the whitener is diagonal, so
  // W (AS AS^T - AA^T) W = K K^T - diag(mu / (mu + lambda)) with K = D^{-1/2} U^T AS.
  DenseMatrix k = linalg::matmul_tn(basis_, sketched);
  for (std::size_t i = 0; i < k.rows(); ++i) {
    for (double& v : k.row(i)) v *= inv_sqrt_[i];
  }
  DenseMatrix e = linalg::matmul_nt(k, k);
  for (std::size_t i = 0; i < e.rows(); ++i) e(i, i) -= whitened_gram_[i];
  const std::vector<double> ev = linalg::symmetric_eigenvalues(linalg::symmetrized(e));
  return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

BoundReport RegularizedWhitener::certify(const DenseMatrix& sketched, double eps) const {
  if (!(eps >= 0.0)) throw InvalidArgument("certify: eps must be >= 0");
  BoundReport report = BoundReport::make("reg_spectral_approx", whitened_error(sketched), eps,
                                         {{"lambda", lambda_}, {"eps", eps}});
  report.holds = report.measured <= eps + kCertifyRoundoff;
  return report;
}

BoundReport check_reg_spectral_approx(const DenseMatrix& a, const DenseMatrix& sketched,
                                      double lambda, double eps) {
  if (sketched.rows() != a.rows()) throw DimensionMismatch("check_reg_spectral_approx: AS rows != A rows");
  return RegularizedWhitener(a, lambda).certify(sketched, eps);
}

linalg::MatrixNorms residuals(const DenseMatrix& a, const DenseMatrix& q) {
  if (q.rows() != a.rows()) throw DimensionMismatch("residuals: Q rows != A rows");
  if (linalg::orthonormality_error(q) > 1e-6) throw NumericalError("residuals: Q is not orthonormal");
  const DenseMatrix proj = linalg::matmul(q, linalg::matmul_tn(q, a));
  return linalg::norms(linalg::subtract(a, proj));
}

linalg::MatrixNorms factorization_residuals(const DenseMatrix& a, const DenseMatrix& y,
                                            const DenseMatrix& x) {
  return linalg::norms(linalg::subtract(a, linalg::matmul(y, x)));
}

double estimate_residual_spectral(const DenseMatrix& a, const DenseMatrix& y, const DenseMatrix& x,
                                  double rel_tol, std::uint64_t seed) {
  const std::size_t m = a.rows(), n = a.cols(), r = y.cols();
  if (y.rows() != m || x.rows() != r || x.cols() != n) {
    throw DimensionMismatch("estimate_residual_spectral: Y X does not match A");
  }
  std::vector<double> t(r), am(m), ym(m), an(n), xn(n);
  // v -> R^T R v with R = A - Y X.
  auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
    kernels::gemv(a, v, am);
    kernels::gemv(x, v, t);
    kernels::gemv(y, t, ym);
    for (std::size_t i = 0; i < m; ++i) am[i] -= ym[i];
    kernels::gemv_t(a, am, an);
    kernels::gemv_t(y, am, t);
    kernels::gemv_t(x, t, xn);
    for (std::size_t j = 0; j < n; ++j) out[j] = an[j] - xn[j];
  };

  const std::size_t max_iter = std::min<std::size_t>(n, 300);
  std::vector<std::vector<double>> basis;
  std::vector<double> alpha, beta;
  std::vector<double> v(n);
  {
    Rng gen(seed);
    std::normal_distribution<double> dist;
    for (double& e : v) e = dist(gen);
    const double nv = norm2(v);
    for (double& e : v) e /= nv;
  }
  std::vector<double> w(n);
  double theta = 0.0;
  for (std::size_t j = 0; j < max_iter; ++j) {
    basis.push_back(v);
    apply(v, w);
    alpha.push_back(dot(v, w));
    // Full reorthogonalization, two passes.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        const double c = dot(b, w);
        for (std::size_t i = 0; i < n; ++i) w[i] -= c * b[i];
      }
    }
    const double bnext = norm2(w);
    const auto dim = static_cast<Eigen::Index>(alpha.size());
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      tri(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < dim) tri(i, i + 1) = tri(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
    theta = std::max(es.eigenvalues()(dim - 1), 0.0);
    const double ritz_residual = bnext * std::abs(es.eigenvectors()(dim - 1, dim - 1));
    if (theta == 0.0 && bnext == 0.0) return 0.0;
    if (ritz_residual <= rel_tol * theta || bnext <= std::numeric_limits<double>::epsilon() * theta) break;
    beta.push_back(bnext);
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / bnext;
  }
  return std::sqrt(theta);
}

double bound_thm_main(const SpectralProfile& profile, std::size_t k, std::size_t l, double eps) {
  require_k(profile, k, profile.size(), "bound_thm_main");
  if (l < k || l > profile.size()) throw InvalidArgument("bound_thm_main: need k <= l <= profile length");
  if (!(eps >= 0.0)) throw InvalidArgument("bound_thm_main: eps must be >= 0");
  const double head = k < profile.size() ? power_of(profile.values[k], profile.kind) : 0.0;
  double tail = 0.0;
  for (std::size_t i = l; i < profile.size(); ++i) tail += power_of(profile.values[i], profile.kind);
  return (1.0 + eps) * head + eps / static_cast<double>(l) * tail;
}

SquaredBounds bound_lemma2(const SpectralProfile& profile, std::size_t k) {
  if (profile.size() < 2) throw InvalidArgument("bound_lemma2: profile too short");
  require_k(profile, k, profile.size() - 1, "bound_lemma2");
  const double t = profile.tail_sum_squares(k);
  return {2.0 / static_cast<double>(k) * t, 4.0 * t};
}

SquaredBounds bound_main_technical_from_root(double lambda1, double lambda2_root, double eps,
                                             std::size_t q, const SpectralProfile& profile) {
  if (!(lambda1 >= 0.0) || !(lambda2_root >= 0.0)) {
    throw InvalidArgument("bound_main_technical: lambda1, lambda2 must be >= 0");
  }
  if (!(eps >= 0.0 && eps <= 0.5)) throw InvalidArgument("bound_main_technical: eps must be in [0, 1/2]");
  const double expo = 1.0 / static_cast<double>(2 * q + 1);
  SquaredBounds out;
  out.spectral_sq = (1.0 + 2.0 * eps) * (std::pow(2.0, expo) * lambda2_root + eps * lambda1);
  const double per_rank = 8.0 * (lambda2_root + lambda1);
  // suffix[r] = sum_{i>r} sigma_i^2, accumulated from the small end.
  std::vector<double> suffix(profile.size() + 1, 0.0);
  for (std::size_t r = profile.size(); r-- > 0;) {
    suffix[r] = suffix[r + 1] + profile.values[r] * profile.values[r];
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r <= profile.size(); ++r) {
    best = std::min(best, per_rank * static_cast<double>(r) + suffix[r]);
  }
  out.frobenius_sq = best;
  return out;
}

SquaredBounds bound_main_technical(double lambda1, double lambda2, double eps, std::size_t q,
                                   const SpectralProfile& profile) {
  if (!(lambda2 >= 0.0)) throw InvalidArgument("bound_main_technical: lambda2 must be >= 0");
  const double root = std::pow(lambda2, 1.0 / static_cast<double>(2 * q + 1));
  return bound_main_technical_from_root(lambda1, root, eps, q, profile);
}

double lambda2_root(const SpectralProfile& sketched, std::size_t k, std::size_t q) {
  if (k < 1) throw InvalidArgument("lambda2_root: k must be >= 1");
  const double p = 2.0 * static_cast<double>(2 * q + 1);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = k; i < sketched.size(); ++i) {
    if (sketched.values[i] > 0.0) top = std::max(top, p * std::log(sketched.values[i]));
  }
  if (!std::isfinite(top)) return 0.0;
  double acc = 0.0;
  for (std::size_t i = k; i < sketched.size(); ++i) {
    if (sketched.values[i] > 0.0) acc += std::exp(p * std::log(sketched.values[i]) - top);
  }
  const double log_lambda2 = top + std::log(acc) - std::log(static_cast<double>(k));
  return std::exp(log_lambda2 / static_cast<double>(2 * q + 1));
}

double lambda2_estimate_lhs(const SpectralProfile& sketched, std::size_t k, std::size_t q) {
  return std::pow(2.0, 1.0 / static_cast<double>(2 * q + 1)) * lambda2_root(sketched, k, q);
}

BoundReport bound_lambda2_estimate(const SpectralProfile& sketched,
                                   const SpectralProfile& profile, std::size_t k,
                                   std::size_t q, double lambda1, double eps) {
  if (k < 1) throw InvalidArgument("bound_lambda2_estimate: k must be >= 1");
  if (!(lambda1 >= 0.0)) throw InvalidArgument("bound_lambda2_estimate: lambda1 must be >= 0");
  const std::size_t m_hat = std::max<std::size_t>(1, sketched.numerical_rank());
  const std::size_t q_min = power::choose_q(eps, m_hat);
  if (q < q_min) {
    throw InvalidArgument("bound_lambda2_estimate: q=" + std::to_string(q) +
                          " below choose_q(eps, rank) = " + std::to_string(q_min));
  }
  const double sigma = k < profile.size() ? profile.values[k] : 0.0;
  const double rhs = (1.0 + 4.0 * eps) * sigma * sigma + 2.0 * lambda1 * eps;
  return BoundReport::make("lambda2_estimate", lambda2_estimate_lhs(sketched, k, q), rhs,
                           {{"k", static_cast<double>(k)},
                            {"q", static_cast<double>(q)},
                            {"lambda1", lambda1},
                            {"eps", eps},
                            {"m_hat", static_cast<double>(m_hat)}});
}

double relative_error(double residual_spectral, std::size_t k, const SpectralProfile& profile) {
  if (k >= profile.size() || profile.values[k] == 0.0) {
    throw NumericalError("relative_error: sigma_{k+1} is zero or missing");
  }
  return residual_spectral / profile.values[k] - 1.0;
}

double relative_error_guarded(double residual_spectral, std::size_t k,
                              const SpectralProfile& profile, bool* normalized, double rel_tol) {
  if (profile.size() == 0 || profile.values.front() == 0.0) {
    throw NumericalError("relative_error_guarded: zero matrix");
  }
  const bool degenerate = k >= profile.size() || profile.values[k] <= rel_tol * profile.values.front();
  if (normalized) *normalized = degenerate;
  if (degenerate) return residual_spectral / profile.values.front();
  return relative_error(residual_spectral, k, profile);
}

}  // namespace skpower::diag
