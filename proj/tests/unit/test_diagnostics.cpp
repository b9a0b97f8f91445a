#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "oracles.hpp"
#include "skpower/data_io.hpp"
#include "skpower/diagnostics.hpp"
#include "skpower/error.hpp"
#include "skpower/linalg.hpp"
#include "skpower/power_methods.hpp"
#include "skpower/rng.hpp"
#include "skpower/sketch.hpp"

namespace skpower {
namespace {

using diag::ProfileKind;
using diag::SpectralProfile;
using testing::for_all;
using testing::Gen;
namespace la = linalg;

SpectralProfile singular(std::vector<double> v) {
  return SpectralProfile::from_values(std::move(v), ProfileKind::Singular);
}

std::vector<double> polydecay_values(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(n) / static_cast<double>(i + 1);
  return v;
}

TEST(SpectralProfile, ValidatesOrderingAndSign) {
  EXPECT_THROW(singular({1, 2}), InvalidArgument);
  EXPECT_THROW(singular({1, -0.5}), InvalidArgument);
  EXPECT_THROW(singular({std::nan(""), 0}), InvalidArgument);
  const auto p = singular({3, 2, 1e-20, 0});
  EXPECT_EQ(p.numerical_rank(), 2u);
  EXPECT_DOUBLE_EQ(p[1], 3.0);
  EXPECT_DOUBLE_EQ(p.tail_sum_squares(1), 4.0 + 1e-40);
  EXPECT_DOUBLE_EQ(p.tail_sum(2), 1e-20);
}

TEST(SpectralProfile, OfMatrixMatchesJacobi) {
  Gen g(71);
  const DenseMatrix a = g.matrix(30, 18);
  const auto p = SpectralProfile::singular_values_of(a);
  const auto oracle = testing::jacobi_singular_values(a);
  ASSERT_EQ(p.size(), oracle.size());
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(p.values[i], oracle[i], 1e-10 * oracle[0]);
  EXPECT_THROW(SpectralProfile::psd_eigenvalues_of(DenseMatrix::from_rows({{0, 1}, {1, 0}})), NumericalError);
}

TEST(LambdaK, DirectEvaluation) {
  EXPECT_DOUBLE_EQ(diag::lambda_k(singular({2, 1, 1}), 1), 2.0);
  const auto p = singular({5, 4, 3});
  EXPECT_EQ(diag::lambda_k(p, 3), 0.0);
  EXPECT_THROW(diag::lambda_k(p, 0), InvalidArgument);
  EXPECT_THROW(diag::lambda_k(p, 4), InvalidArgument);
}

TEST(LambdaK, PolydecayMatchesBruteForce) {
  const auto v = polydecay_values(100);
  const long double brute = testing::tail_power_sum(v, 10, 2) / 10.0L;
  EXPECT_NEAR(diag::lambda_k(singular(v), 10), static_cast<double>(brute), 1e-12 * static_cast<double>(brute));
}

TEST(LambdaK, NonIncreasingInK) {
  for_all(20, 72, [](Gen& g) {
    const auto p = singular(g.profile(g.dim(2, 60)));
    for (std::size_t k = 1; k < p.size(); ++k) EXPECT_LE(diag::lambda_k(p, k + 1), diag::lambda_k(p, k));
  });
}

TEST(RegSpectralApprox, IdentitySketchIsExact) {
  Gen g(73);
  const DenseMatrix a = g.matrix(20, 30);
  const auto p = SpectralProfile::singular_values_of(a);
  for (double eps : {0.0, 0.1, 0.5}) {
    const auto report = diag::check_reg_spectral_approx(a, a, diag::lambda_k(p, 5), eps);
    EXPECT_LE(report.measured, 1e-12);
    EXPECT_TRUE(report.holds);
  }
}

TEST(RegSpectralApprox, ZeroEpsFailsForARealSketch) {
  Gen g(74);
  const DenseMatrix a = g.matrix(20, 60);
  const auto p = SpectralProfile::singular_values_of(a);
  const auto s = sketch::make_sketch(sketch::SketchKind::gaussian(), 60, 30, 5);
  EXPECT_FALSE(diag::check_reg_spectral_approx(a, s.apply_right(a), diag::lambda_k(p, 5), 0.0).holds);
}

TEST(RegSpectralApprox, ZeroLambdaWithSingularGramThrows) {
  Gen g(75);
  const DenseMatrix a = g.low_rank(10, 20, 4);
  EXPECT_THROW(diag::check_reg_spectral_approx(a, a, 0.0, 0.5), NumericalError);
  EXPECT_NO_THROW(diag::check_reg_spectral_approx(g.matrix(10, 20), g.matrix(10, 5), 0.0, 0.5));
}

TEST(RegSpectralApprox, GaussianAtCalibratedSizePassesEnsemble) {
  const DenseMatrix a = io::gen_polydecay(500, 300, 4);
  const auto p = SpectralProfile::singular_values_of(a);
  const diag::RegularizedWhitener w(a, diag::lambda_k(p, 10));
  const std::size_t r = sketch::sketch_size(sketch::SketchFamily::Gaussian, 10, 0.5, 0.1, 8.0).r;
  std::size_t pass = 0;
  for (std::size_t t = 0; t < 50; ++t) {
    const auto s = sketch::make_sketch(sketch::SketchKind::gaussian(), 300, r, derive_seed(5, t));
    pass += w.certify(s.apply_right(a), 0.5).holds;
  }
  EXPECT_GE(pass, 45u);
}

// The whitened norm equals max |pencil eigenvalue - 1|, so the verdicts of the
// two tests coincide.
TEST(RegSpectralApprox, AgreesWithGeneralizedEigenvalueTest) {
  for_all(25, 76, [](Gen& g) {
    const std::size_t m = g.dim(3, 25), n = g.dim(m, 50);
    const DenseMatrix a = g.matrix(m, n);
    const std::size_t r = g.dim(1, n);
    const auto s = sketch::make_sketch(g.kind(r), n, r, g.seed());
    const DenseMatrix as = s.apply_right(a);
    const double lambda = diag::lambda_k(SpectralProfile::singular_values_of(a), g.dim(1, m - 1));
    const auto eig = testing::pencil_eigenvalues(a, as, lambda);
    const double pencil = std::max(std::abs(eig.front() - 1.0), std::abs(eig.back() - 1.0));
    const double eps = g.uniform(0.05, 1.0);
    const auto report = diag::check_reg_spectral_approx(a, as, lambda, eps);
    EXPECT_NEAR(report.measured, pencil, 1e-8 * std::max(1.0, pencil));
    if (std::abs(pencil - eps) > 1e-8) {
      EXPECT_EQ(report.holds, pencil <= eps);
    }
  });
}

TEST(Residuals, SpanningAndSingleColumn) {
  Gen g(77);
  const DenseMatrix a = g.low_rank(15, 10, 3);
  const auto full = diag::residuals(a, la::orthonormalize(a));
  EXPECT_LE(full.spectral, 1e-8 * la::spectral_norm(a));
  EXPECT_LE(full.frobenius, 1e-8 * la::spectral_norm(a));

  const std::vector<double> d{3, 2};
  const auto one = diag::residuals(DenseMatrix::diagonal(d), DenseMatrix::from_rows({{1}, {0}}));
  EXPECT_NEAR(one.spectral, 2.0, 1e-14);
  EXPECT_NEAR(one.frobenius, 2.0, 1e-14);
  EXPECT_THROW(diag::residuals(DenseMatrix::diagonal(d), DenseMatrix::from_rows({{1}, {1}})), NumericalError);
}

TEST(Residuals, MatchExplicitComputation) {
  for_all(10, 78, [](Gen& g) {
    const std::size_t m = g.dim(5, 40);
    const DenseMatrix a = g.matrix(m, g.dim(5, 40));
    const DenseMatrix q = g.orthonormal(m, g.dim(1, m));
    const DenseMatrix r = testing::naive_subtract(a, testing::naive_matmul(testing::projector(q), a));
    const auto got = diag::residuals(a, q);
    EXPECT_NEAR(got.spectral, testing::spectral_norm(r), 1e-10 * testing::frobenius(a));
    EXPECT_NEAR(got.frobenius, testing::frobenius(r), 1e-10 * testing::frobenius(a));
  });
}

TEST(Residuals, FactorizationAndLanczosEstimate) {
  for_all(10, 79, [](Gen& g) {
    const std::size_t m = g.dim(10, 80), n = g.dim(10, 80), r = g.dim(1, 8);
    const DenseMatrix a = g.matrix(m, n), y = g.matrix(m, r), x = g.matrix(r, n);
    const double want = testing::spectral_norm(testing::naive_subtract(a, testing::naive_matmul(y, x)));
    EXPECT_NEAR(diag::factorization_residuals(a, y, x).spectral, want, 1e-10 * want);
    EXPECT_NEAR(diag::estimate_residual_spectral(a, y, x), want, 1e-6 * want);
  });
  const DenseMatrix a = testing::Gen(80).low_rank(20, 20, 2);
  const DenseMatrix q = la::orthonormalize(a);
  EXPECT_LE(diag::estimate_residual_spectral(a, q, la::matmul_tn(q, a)), 1e-10 * la::spectral_norm(a));
}

TEST(BoundThmMain, CollapsesAndMatchesSummation) {
  const auto p = singular(polydecay_values(100));
  EXPECT_DOUBLE_EQ(diag::bound_thm_main(p, 10, 20, 0.0), p[11] * p[11]);
  EXPECT_NEAR(diag::bound_thm_main(p, 10, 100, 0.3), 1.3 * p[11] * p[11], 1e-12);
  const long double direct = 1.5L * p[11] * p[11] + 0.5L / 20 * testing::tail_power_sum(p.values, 20, 2);
  EXPECT_NEAR(diag::bound_thm_main(p, 10, 20, 0.5), static_cast<double>(direct), 1e-12 * static_cast<double>(direct));
  // Eigenvalue profiles are unsquared.
  const auto e = SpectralProfile::from_values(polydecay_values(100), ProfileKind::Eigen);
  const long double unsq = 1.5L * e[11] + 0.5L / 20 * testing::tail_power_sum(e.values, 20, 1);
  EXPECT_NEAR(diag::bound_thm_main(e, 10, 20, 0.5), static_cast<double>(unsq), 1e-12 * static_cast<double>(unsq));
  EXPECT_THROW(diag::bound_thm_main(p, 20, 10, 0.5), InvalidArgument);
  EXPECT_THROW(diag::bound_thm_main(p, 10, 101, 0.5), InvalidArgument);
}

TEST(BoundLemma2, Examples) {
  const auto b = diag::bound_lemma2(singular({1, 1}), 1);
  EXPECT_DOUBLE_EQ(b.spectral_sq, 2.0);
  EXPECT_DOUBLE_EQ(b.frobenius_sq, 4.0);
  const auto z = diag::bound_lemma2(singular({4, 3, 0, 0}), 2);
  EXPECT_EQ(z.spectral_sq, 0.0);
  EXPECT_EQ(z.frobenius_sq, 0.0);
  const auto v = polydecay_values(100);
  const auto t = diag::bound_lemma2(singular(v), 10);
  const double tail = static_cast<double>(testing::tail_power_sum(v, 10, 2));
  EXPECT_NEAR(t.spectral_sq, 0.2 * tail, 1e-12 * tail);
  EXPECT_NEAR(t.frobenius_sq, 4 * tail, 1e-12 * tail);
  EXPECT_THROW(diag::bound_lemma2(singular({1, 1}), 2), InvalidArgument);
}

TEST(BoundMainTechnical, ZeroLambda2AndLargeQ) {
  const auto p = singular(polydecay_values(50));
  const auto b = diag::bound_main_technical(3.0, 0.0, 0.25, 4, p);
  EXPECT_DOUBLE_EQ(b.spectral_sq, 1.5 * 0.25 * 3.0);
  const double lambda2 = 0.37;
  const auto large = diag::bound_main_technical(0.0, lambda2, 0.5, 50, p);
  EXPECT_NEAR(large.spectral_sq, 2.0 * std::pow(2 * lambda2, 1.0 / 101), 1e-14);
  EXPECT_NEAR(std::pow(2 * lambda2, 1.0 / 101), 1.0, 0.01);
}

TEST(BoundMainTechnical, FrobeniusScanMatchesBruteForce) {
  for_all(10, 81, [](Gen& g) {
    const auto p = singular(g.profile(g.dim(1, 80)));
    const double l1 = g.uniform(0, 5), l2 = g.uniform(0, 100);
    const std::size_t q = g.dim(0, 5);
    const double root = std::pow(l2, 1.0 / (2 * q + 1));
    long double best = INFINITY;
    for (std::size_t r = 0; r <= p.size(); ++r) {
      best = std::min(best, 8.0L * r * (root + l1) + testing::tail_power_sum(p.values, r, 2));
    }
    const auto b = diag::bound_main_technical(l1, l2, 0.5, q, p);
    EXPECT_NEAR(b.frobenius_sq, static_cast<double>(best), 1e-12 * static_cast<double>(best));
  });
}

TEST(BoundMainTechnical, MonotoneInParameters) {
  for_all(10, 82, [](Gen& g) {
    const auto p = singular(g.profile(30));
    const std::size_t q = g.dim(0, 4);
    double l1 = 0.01, l2 = 0.01, eps = 0.0;
    auto prev = diag::bound_main_technical(l1, l2, eps, q, p);
    for (int step = 0; step < 30; ++step) {
      switch (g.dim(0, 2)) {
        case 0: l1 *= 1.5; break;
        case 1: l2 *= 1.5; break;
        default: eps = std::min(0.5, eps + 0.05); break;
      }
      const auto next = diag::bound_main_technical(l1, l2, eps, q, p);
      EXPECT_GE(next.spectral_sq, prev.spectral_sq);
      EXPECT_GE(next.frobenius_sq, prev.frobenius_sq);
      prev = next;
    }
  });
  const auto p = singular({1});
  EXPECT_THROW(diag::bound_main_technical(-1, 0, 0.1, 1, p), InvalidArgument);
  EXPECT_THROW(diag::bound_main_technical(0, 0, 0.6, 1, p), InvalidArgument);
}

TEST(Lambda2Estimate, DirectEvaluations) {
  // [1,1,1], k = 1, q = 1: ((2/1) * 2)^{1/3}
  EXPECT_NEAR(diag::lambda2_estimate_lhs(singular({1, 1, 1}), 1, 1), std::cbrt(4.0), 1e-12);
  // Single non-zero tail entry.
  for (std::size_t q : {0u, 2u, 7u}) {
    const double s = 0.8;
    EXPECT_NEAR(diag::lambda2_estimate_lhs(singular({3, s, 0, 0}), 1, q),
                std::pow(2.0, 1.0 / (2 * q + 1)) * s * s, 1e-14);
  }
  EXPECT_EQ(diag::lambda2_estimate_lhs(singular({3, 0}), 1, 2), 0.0);
}

TEST(Lambda2Estimate, LogDomainMatchesExtendedPrecision) {
  for_all(20, 83, [](Gen& g) {
    auto v = g.profile(g.dim(2, 200));
    // Push some cases into the range where v^{2(2q+1)} overflows a double.
    if (g.coin()) for (double& x : v) x *= 1e60;
    const std::size_t k = g.dim(1, v.size() - 1);
    const std::size_t q = power::choose_q(g.uniform(0.05, 0.5), v.size());
    const double want = testing::lambda2_lhs_extended(v, k, q);
    EXPECT_NEAR(diag::lambda2_estimate_lhs(singular(v), k, q), want, 1e-9 * want);
  });
}

TEST(Lambda2Estimate, ReportRequiresEnoughPowerSteps) {
  const auto sketched = singular({4, 2, 1, 0.5});
  const auto profile = singular({4, 2, 1, 0.5});
  EXPECT_THROW(diag::bound_lambda2_estimate(sketched, profile, 1, 0, 1.0, 0.5), InvalidArgument);
  const std::size_t q = power::choose_q(0.5, 4);
  const auto report = diag::bound_lambda2_estimate(sketched, profile, 1, q, 1.0, 0.5);
  EXPECT_DOUBLE_EQ(report.rhs, 3.0 * 4.0 + 1.0);
  EXPECT_EQ(report.holds, report.measured <= report.rhs);
  EXPECT_EQ(report.params.at("m_hat"), 4.0);
}

TEST(RelativeError, Examples) {
  const auto p = singular({5, 2, 1});
  EXPECT_DOUBLE_EQ(diag::relative_error(2.0, 1, p), 0.0);
  EXPECT_DOUBLE_EQ(diag::relative_error(4.0, 1, p), 1.0);
  EXPECT_THROW(diag::relative_error(1.0, 1, singular({5, 0})), NumericalError);
  EXPECT_THROW(diag::relative_error(1.0, 2, singular({5, 1})), NumericalError);

  bool normalized = true;
  EXPECT_DOUBLE_EQ(diag::relative_error_guarded(4.0, 1, p, &normalized), 1.0);
  EXPECT_FALSE(normalized);
  EXPECT_DOUBLE_EQ(diag::relative_error_guarded(1e-3, 1, singular({5, 1e-20}), &normalized), 2e-4);
  EXPECT_TRUE(normalized);
}

TEST(BoundReport, HoldsAndSerialization) {
  const auto r = diag::BoundReport::make("x", 1.0, 2.0, {{"c", 1.25}, {"k", 3}});
  EXPECT_TRUE(r.holds);
  EXPECT_FALSE(diag::BoundReport::make("y", 2.5, 2.0).holds);
  const auto j = r.to_json();
  EXPECT_EQ(j.at("name"), "x");
  EXPECT_EQ(j.at("params").at("c"), 1.25);
  EXPECT_EQ(r.csv_row(), "x,2,1,1,c=1.25;k=3");
  EXPECT_EQ(diag::BoundReport::csv_header(), "name,rhs,measured,holds,params");
}

}  // namespace
}  // namespace skpower
