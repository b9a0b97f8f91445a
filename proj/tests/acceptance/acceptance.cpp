// One line per acceptance criterion. Exit status is non-zero when a hard
// criterion fails. Criterion 3 is a known red (see README) and criterion 8
// is soft; neither changes the exit status.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "generators.hpp"
#include "oracles.hpp"
#include "calibration.hpp"
#include "skpower/bench_protocol.hpp"
#include "skpower/data_io.hpp"
#include "skpower/diagnostics.hpp"
#include "skpower/linalg.hpp"
#include "skpower/power_methods.hpp"
#include "skpower/rng.hpp"
#include "skpower/sketch.hpp"

namespace {

using namespace skpower;
using power::RangeFinderSpec;
using sketch::SketchKind;
namespace la = linalg;
namespace st = skpower::testing;
namespace cal = skpower::testing::calibration;

enum class Severity { Hard, KnownRed, Soft };

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  Severity severity;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string report_params(const diag::BoundReport& r) {
  std::string out;
  for (const auto& [k, v] : r.params) out += (out.empty() ? "" : " ") + k + "=" + fmt("%g", v);
  return out;
}

const SketchKind kKinds[] = {SketchKind::gaussian(), SketchKind::sign(), SketchKind::count_sketch(1),
                             SketchKind::count_sketch(3), SketchKind::srht()};

// -- 1, 2: square-root-of-rank bounds ------------------------------------------

Outcome remark_bound(bool factorize) {
  const DenseMatrix a = io::gen_polydecay(1000, 500, 1);
  const auto profile = diag::SpectralProfile::singular_values_of(a);
  const double bound = std::sqrt(21.0) * profile[21];
  std::size_t pass = 0;
  double worst = 0.0;
  RangeFinderSpec spec;
  for (std::size_t t = 0; t < 20; ++t) {
    spec = RangeFinderSpec::from_accuracy(1000, 500, 20, 25, 0.5, SketchKind::count_sketch(1),
                                          derive_seed(11, t), cal::kCountSketchB);
    double r = 0.0;
    if (factorize) {
      const auto f = power::lowrank_factorize(a, spec);
      r = diag::factorization_residuals(a, f.Y, f.X).spectral;
    } else {
      r = diag::residuals(a, power::range_finder_sketched(a, spec)).spectral;
    }
    pass += r <= bound;
    worst = std::max(worst, r / bound);
  }
  const auto rep = diag::BoundReport::make(
      factorize ? "remark2" : "remark1", worst, 1.0,
      {{"c", cal::kCountSketchB}, {"r1", double(spec.r1)}, {"s", double(spec.sketch_kind.nnz_per_row)},
       {"q", double(spec.q)}});
  return {pass >= 18, fmt("%zu/20 (need 18), worst residual/bound=%.3f, %s", pass, worst, report_params(rep).c_str())};
}

// -- 3: Gaussian range finder recovery ----------------------------------------

std::size_t lemma2_passes(const DenseMatrix& a, const diag::SpectralProfile& profile, std::size_t k,
                          std::size_t r2, double* worst_spec, double* worst_frob) {
  const auto b = diag::bound_lemma2(profile, k);
  std::size_t pass = 0;
  for (std::size_t t = 0; t < 20; ++t) {
    const auto n = diag::residuals(a, power::range_finder_classical(a, k, r2, 0, derive_seed(13, t)));
    const double s = n.spectral * n.spectral / b.spectral_sq, f = n.frobenius * n.frobenius / b.frobenius_sq;
    pass += s <= 1.0 && f <= 1.0;
    *worst_spec = std::max(*worst_spec, s);
    *worst_frob = std::max(*worst_frob, f);
  }
  return pass;
}

Outcome lemma2() {
  const DenseMatrix a = io::gen_polydecay(400, 200, 3);
  const auto profile = diag::SpectralProfile::singular_values_of(a);
  double ws = 0, wf = 0, ws3 = 0, wf3 = 0;
  const std::size_t pass = lemma2_passes(a, profile, 10, 20, &ws, &wf);
  const std::size_t pass3 = lemma2_passes(a, profile, 10, 30, &ws3, &wf3);
  return {pass >= 18, fmt("r2=2k: %zu/20 (need 18), worst spec ratio=%.3f frob ratio=%.3f; "
                          "info r2=3k: %zu/20 worst spec ratio=%.3f",
                          pass, ws, wf, pass3, ws3)};
}

// -- 4: regularized spectral approximation certifier --------------------------

Outcome definition1() {
  const DenseMatrix a = io::gen_polydecay(500, 300, 4);
  const auto profile = diag::SpectralProfile::singular_values_of(a);
  const diag::RegularizedWhitener w(a, diag::lambda_k(profile, 10));
  const std::size_t r = sketch::sketch_size(sketch::SketchFamily::Gaussian, 10, 0.5, 0.1, 8.0).r;
  auto rate = [&](std::size_t rr, double* worst) {
    std::size_t pass = 0;
    for (std::size_t t = 0; t < 50; ++t) {
      const auto s = sketch::make_sketch(SketchKind::gaussian(), 300, rr, derive_seed(41, t));
      const auto rep = w.certify(s.apply_right(a), 0.5);
      pass += rep.holds;
      *worst = std::max(*worst, rep.measured);
    }
    return pass;
  };
  double worst = 0, worst_q = 0;
  const std::size_t full = rate(r, &worst), quarter = rate(r / 4, &worst_q);
  return {full >= 45 && quarter < 45,
          fmt("r=%zu: %zu/50 (need 45) worst=%.3f; r=%zu: %zu/50 (need <45) worst=%.3f", r, full, worst, r / 4,
              quarter, worst_q)};
}

// -- 5: Nystrom identity --------------------------------------------------------

Outcome nystrom_identity() {
  double worst = 0.0;
  bool ok = true;
  for (std::size_t t = 0; t < 10; ++t) {
    st::Gen g(derive_seed(51, t));
    const DenseMatrix gm = g.matrix(150, 150);
    const DenseMatrix a = la::symmetrized(la::matmul_tn(gm, gm));
    const DenseMatrix root = la::psd_sqrt(a);
    const double tol = 1e-7 * la::spectral_norm(a);
    for (std::size_t q : {0u, 1u, 3u}) {
      RangeFinderSpec spec;
      spec.k = 10;
      spec.l = 20;
      spec.r1 = 40;
      spec.r2 = 12;
      spec.q = q;
      spec.sketch_kind = kKinds[t % std::size(kKinds)];
      spec.seed = derive_seed(52, t);
      const DenseMatrix lhs = power::nystrom_reconstruct(power::nystrom_psd(a, spec));
      const DenseMatrix qrf = power::range_finder_sketched(root, spec);
      const DenseMatrix rhs = la::matmul(la::matmul(root, la::matmul_nt(qrf, qrf)), root);
      const double d = la::spectral_norm(la::subtract(lhs, rhs));
      ok = ok && d <= tol;
      worst = std::max(worst, d / tol);
    }
  }
  return {ok, fmt("30/30 settings required, worst difference/(1e-7 |A|)=%.3g", worst)};
}

// -- 6: randsvd residual identity ---------------------------------------------

Outcome randsvd_identity() {
  double worst = 0.0;
  for (std::size_t t = 0; t < 20; ++t) {
    st::Gen g(derive_seed(61, t));
    const std::size_t m = g.dim(20, 120), n = g.dim(20, 120), k = g.dim(1, 8);
    const DenseMatrix a = g.matrix(m, n);
    RangeFinderSpec spec;
    spec.k = k;
    spec.l = k;
    spec.r1 = g.dim(2 * k, std::max<std::size_t>(2 * k, n));
    spec.r2 = g.dim(k, 2 * k);
    spec.q = g.dim(0, 3);
    spec.sketch_kind = g.kind(spec.r1);
    if (spec.sketch_kind.family == sketch::SketchFamily::Srht) {
      std::size_t pad = 1;
      while (pad < n) pad <<= 1;
      spec.r1 = std::min(spec.r1, pad);
    }
    spec.seed = g.seed();
    const DenseMatrix q = power::range_finder_sketched(a, spec);
    const la::SvdResult svd = power::randsvd(a, q);
    const DenseMatrix usv = la::matmul(la::scale_columns(svd.U, svd.sigma), svd.V.transposed());
    const double lhs = st::frobenius(st::naive_subtract(a, usv));
    const double rhs = st::frobenius(st::naive_subtract(a, st::naive_matmul(st::projector(q), a)));
    worst = std::max(worst, std::abs(lhs - rhs) / st::frobenius(a));
  }
  return {worst <= 1e-10, fmt("max relative gap=%.3g (limit 1e-10)", worst)};
}

// -- 7: main bound with surfaced constants ------------------------------------

Outcome main_bound() {
  const DenseMatrix a = io::gen_polydecay(800, 400, 2);
  const auto profile = diag::SpectralProfile::singular_values_of(a);
  const double rhs = diag::bound_thm_main(profile, 20, 80, 0.5);
  std::size_t pass = 0;
  diag::BoundReport worst;
  for (std::size_t t = 0; t < 20; ++t) {
    const auto spec = RangeFinderSpec::from_accuracy(800, 400, 20, 80, 0.5, SketchKind::count_sketch(1),
                                                     derive_seed(12, t), cal::kCountSketchB);
    const double r = diag::residuals(a, power::range_finder_sketched(a, spec)).spectral;
    const auto rep = diag::BoundReport::make(
        "thm-main", r * r, rhs,
        {{"c", cal::kCountSketchB}, {"r1", double(spec.r1)}, {"s", double(spec.sketch_kind.nnz_per_row)},
         {"q", double(spec.q)}, {"k", 20}, {"l", 80}, {"eps", 0.5}});
    pass += rep.holds;
    if (t == 0 || rep.measured / rep.rhs > worst.measured / worst.rhs) worst = rep;
  }
  return {pass >= 18, fmt("%zu/20 (need 18), worst report %s", pass, worst.csv_row().c_str())};
}

// -- 8: error-vs-time benchmark -----------------------------------------------

std::string reach_text(const std::optional<double>& t) { return t ? fmt("%.0fms", *t) : "never"; }

Outcome benchmark() {
  bench::BenchConfig c;
  c.dataset = io::parse_dataset("polydecay:4000x2000:1");
  c.methods = {bench::Method::ClassicalRandsvd, bench::Method::SketchedRandsvd};
  c.k = 40;
  c.l_values = {400};
  c.trials = 10;
  c.sketch_kind = SketchKind::count_sketch(1);
  c.timing_threads = 1;
  const DenseMatrix a = io::load_dataset(c.dataset);
  const auto profile = diag::SpectralProfile::singular_values_of(a);
  const auto rows = bench::run_benchmark(c, a, profile);
  const auto classical = bench::mean_curve(rows, "classical-randsvd", 400);
  const auto sketched = bench::mean_curve(rows, "sketched-randsvd", 400);
  const auto tc = bench::time_to_reach(classical, 0.1), ts = bench::time_to_reach(sketched, 0.1);
  const bool pass = ts && (!tc || *ts < *tc);
  std::string detail = fmt("l=400: time to 0.1 classical=%s sketched=%s, sketched floor=%.4f at %.0fms",
                           reach_text(tc).c_str(), reach_text(ts).c_str(), sketched.back().mean_rel_err,
                           sketched.back().mean_time_ms);

  // Informational: a larger sketch lowers the sketched error floor.
  c.methods = {bench::Method::SketchedRandsvd};
  c.l_values = {800};
  c.trials = 3;
  const auto wide = bench::mean_curve(bench::run_benchmark(c, a, profile), "sketched-randsvd", 800);
  const auto tw = bench::time_to_reach(wide, 0.1);
  detail += fmt("; info l=800 (3 trials): time to 0.1=%s floor=%.4f", reach_text(tw).c_str(),
                wide.back().mean_rel_err);
  return {pass, detail};
}

// -- 9: exact-rank recovery ----------------------------------------------------

Outcome exact_rank() {
  std::size_t runs = 0, ok = 0;
  double worst = 0.0;
  for (const SketchKind& kind : kKinds) {
    for (std::size_t t = 0; t < 5; ++t) {
      st::Gen g(derive_seed(91, runs));
      const std::size_t r = 5;
      RangeFinderSpec spec;
      spec.k = r;
      spec.l = r;
      spec.r1 = 24;
      spec.r2 = 8;
      spec.q = 0;
      spec.sketch_kind = kind;
      spec.seed = g.seed();
      const DenseMatrix a = g.low_rank(120, 80, r);
      const DenseMatrix p = g.psd(80, r);
      const double na = la::spectral_norm(a), np = la::spectral_norm(p);

      const double e1 = diag::residuals(a, power::range_finder_sketched(a, spec)).spectral / na;
      const auto f = power::lowrank_factorize(a, spec);
      const double e2 = diag::factorization_residuals(a, f.Y, f.X).spectral / na;
      const double e3 = la::spectral_norm(la::subtract(p, power::nystrom_reconstruct(power::nystrom_psd(p, spec)))) / np;
      for (double e : {e1, e2, e3}) {
        ++runs;
        ok += e <= 1e-6;
        worst = std::max(worst, e);
      }
    }
  }
  return {ok == runs, fmt("%zu/%zu runs within 1e-6 |A|, worst=%.3g", ok, runs, worst)};
}

// -- 10: fast path versus densified -------------------------------------------

Outcome fast_path() {
  double worst = 0.0;
  std::size_t cases = 0, odd_srht = 0;
  const SketchKind kinds[] = {SketchKind::gaussian(), SketchKind::sign(), SketchKind::count_sketch(2),
                              SketchKind::srht()};
  for (const SketchKind& kind : kinds) {
    for (std::size_t t = 0; t < 25; ++t) {
      st::Gen g(derive_seed(101, cases++));
      const std::size_t n = g.dim(2, 300);
      const std::size_t r = g.dim(1, std::min<std::size_t>(n, 80));
      if (kind.family == sketch::SketchFamily::Srht && (n & (n - 1)) != 0) ++odd_srht;
      const auto op = sketch::make_sketch(kind, n, r, g.seed());
      const DenseMatrix s = op.densify();
      const DenseMatrix a = g.matrix(g.dim(1, 40), n), b = g.matrix(n, g.dim(1, 40));
      worst = std::max(worst, st::max_abs_diff(op.apply_right(a), st::naive_matmul(a, s)) /
                                  st::frobenius(a));
      worst = std::max(worst, st::max_abs_diff(op.apply_left_transpose(b),
                                                    st::naive_matmul(st::naive_transpose(s), b)) /
                                  st::frobenius(b));
    }
  }
  return {worst <= 1e-10 && odd_srht > 0,
          fmt("%zu cases (%zu SRHT with non-power-of-two n), worst relative gap=%.3g", cases, odd_srht, worst)};
}

// -- 11: lambda2 estimate --------------------------------------------------------

Outcome lambda2() {
  const std::size_t k = 5;
  const double eps = 0.5;
  std::size_t certified = 0, pass = 0, attempts = 0;
  double worst = 0.0;
  while (certified < 20 && attempts < 100) {
    const std::uint64_t seed = derive_seed(111, attempts++);
    const DenseMatrix a = io::gen_polydecay(150, 100, seed);
    const auto profile = diag::SpectralProfile::singular_values_of(a);
    const double lambda1 = diag::lambda_k(profile, k);
    const std::size_t r = sketch::sketch_size(sketch::SketchFamily::Gaussian, k, eps, 0.1, cal::kGaussian).r;
    const DenseMatrix as = sketch::make_sketch(SketchKind::gaussian(), 100, r, derive_seed(seed, 1)).apply_right(a);
    if (!diag::RegularizedWhitener(a, lambda1).certify(as, eps).holds) continue;
    ++certified;
    const auto sketched = diag::SpectralProfile::singular_values_of(as);
    const std::size_t q = power::choose_q(eps, sketched.numerical_rank());
    const auto rep = diag::bound_lambda2_estimate(sketched, profile, k, q, lambda1, eps);
    pass += rep.holds;
    worst = std::max(worst, rep.measured / rep.rhs);
  }
  return {certified == 20 && pass >= 18,
          fmt("%zu/%zu certified pairs (need 18 of 20, %zu draws), worst lhs/rhs=%.3f", pass, certified, attempts,
              worst)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> skip, only;
  app.add_option("--skip", skip, "criterion ids to skip");
  app.add_option("--only", only, "run only these criterion ids");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "range finder sqrt(k+1) bound", 120, Severity::Hard, [] { return remark_bound(false); }},
      {2, "factorization sqrt(k+1) bound", 180, Severity::Hard, [] { return remark_bound(true); }},
      {3, "gaussian range finder recovery", 60, Severity::KnownRed, lemma2},
      {4, "regularized approximation certifier", 180, Severity::Hard, definition1},
      {5, "nystrom identity", 60, Severity::Hard, nystrom_identity},
      {6, "randsvd residual identity", 30, Severity::Hard, randsvd_identity},
      {7, "main bound with constants", 120, Severity::Hard, main_bound},
      {8, "sketched reaches 0.1 sooner", 900, Severity::Soft, benchmark},
      {9, "exact-rank recovery", 60, Severity::Hard, exact_rank},
      {10, "fast path equivalence", 30, Severity::Hard, fast_path},
      {11, "lambda2 estimate", 120, Severity::Hard, lambda2},
  };
  const std::set<int> skip_set(skip.begin(), skip.end()), only_set(only.begin(), only.end());

  int hard_failures = 0;
  for (const Criterion& c : criteria) {
    if (skip_set.count(c.id) || (!only_set.empty() && !only_set.count(c.id))) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = secs <= c.budget_s;
    const bool pass = o.pass && in_budget;
    const char* tag = pass ? "PASS"
                           : c.severity == Severity::Soft    ? "SOFT-FAIL"
                           : c.severity == Severity::KnownRed ? "FAIL (known red)"
                                                              : "FAIL";
    if (!pass && c.severity == Severity::Hard) ++hard_failures;
    std::printf("[%s] %d %s: %s; %.1fs (budget %.0fs)\n", tag, c.id, c.name.c_str(), o.detail.c_str(), secs,
                c.budget_s);
    std::fflush(stdout);
  }
  return hard_failures == 0 ? 0 : 1;
}
