#include "skpower/power_methods.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "skpower/error.hpp"
#include "skpower/rng.hpp"
#include "stopwatch.hpp"

namespace skpower::power {
namespace {

std::uint64_t substream(const RangeFinderSpec& spec, SeedStream stream) {
  return derive_seed(spec.seed, static_cast<std::uint64_t>(stream));
}

}  // namespace

void RangeFinderSpec::validate(std::size_t m, std::size_t n) const {
  const std::size_t p = std::min(m, n);
  if (k < 1) throw InvalidArgument("spec: k must be >= 1");
  if (l < k) throw InvalidArgument("spec: need k <= l (k=" + std::to_string(k) + ", l=" + std::to_string(l) + ")");
  if (l > p) throw InvalidArgument("spec: need l <= min(m, n) = " + std::to_string(p));
  if (r2 < k) throw InvalidArgument("spec: need r2 >= k");
  if (r1 < 1) throw InvalidArgument("spec: need r1 >= 1");
  if (!(eps > 0.0 && eps <= 0.5)) throw InvalidArgument("spec: eps must be in (0, 1/2]");
}

RangeFinderSpec RangeFinderSpec::from_accuracy(std::size_t m, std::size_t n, std::size_t k,
                                               std::size_t l, double eps, sketch::SketchKind kind,
                                               std::uint64_t seed, double c,
                                               sketch::CountSketchRegime regime, double delta,
                                               bool keep_nnz) {
  const sketch::SketchSize size = sketch::sketch_size(kind.family, l, eps, delta, c, regime, n);
  RangeFinderSpec spec;
  spec.k = k;
  spec.l = l;
  spec.r1 = size.r;
  spec.r2 = 2 * k;
  spec.eps = eps;
  spec.seed = seed;
  spec.sketch_kind = kind;
  if (kind.family == sketch::SketchFamily::CountSketch && !keep_nnz) {
    spec.sketch_kind.nnz_per_row = std::min(size.s, size.r);
  }
  spec.q = choose_q(eps, std::min(m, spec.r1));
  spec.validate(m, n);
  return spec;
}

SubspaceIteration::SubspaceIteration(const DenseMatrix& op, const DenseMatrix& omega,
                                     bool stabilized)
    : op_(&op), block_(linalg::matmul(op, omega)), stabilized_(stabilized) {}

void SubspaceIteration::step() {
  if (stabilized_ && power_ == 0) block_ = linalg::orthonormalize(block_);
  const DenseMatrix z = linalg::matmul_tn(*op_, block_);
  block_ = linalg::matmul(*op_, z);
  if (stabilized_) block_ = linalg::orthonormalize(block_);
  ++power_;
}

SymmetricPowerIteration::SymmetricPowerIteration(const DenseMatrix& w, const DenseMatrix& omega,
                                                 bool stabilized)
    : w_(&w), block_(omega), stabilized_(stabilized) {
  if (w.rows() != w.cols()) throw DimensionMismatch("symmetric power iteration: W not square");
  if (omega.rows() != w.cols()) throw DimensionMismatch("symmetric power iteration: Omega rows != W size");
}

void SymmetricPowerIteration::step() {
  if (stabilized_ && power_ == 0) block_ = linalg::orthonormalize(block_);
  block_ = linalg::matmul(*w_, block_);
  if (stabilized_) block_ = linalg::orthonormalize(block_);
  ++power_;
}

DenseMatrix power_iterate(const DenseMatrix& atil, const DenseMatrix& omega, std::size_t q,
                          bool stabilized) {
  SubspaceIteration it(atil, omega, stabilized);
  for (std::size_t i = 0; i < q; ++i) it.step();
  return it.current();
}

sketch::SketchOperator primary_sketch(const RangeFinderSpec& spec, std::size_t n) {
  return sketch::make_sketch(spec.sketch_kind, n, spec.r1, substream(spec, SeedStream::PrimarySketch));
}

sketch::SketchOperator regression_sketch(const RangeFinderSpec& spec, std::size_t m) {
  const sketch::SketchKind kind = spec.regression_kind.value_or(spec.sketch_kind);
  const std::size_t r = kind.family == sketch::SketchFamily::Identity ? m : spec.regression_dim.value_or(spec.r1);
  return sketch::make_sketch(kind, m, r, substream(spec, SeedStream::RegressionSketch));
}

DenseMatrix starting_block(const RangeFinderSpec& spec, std::size_t r1) {
  return sketch::make_sketch(spec.omega_kind, r1, spec.r2, substream(spec, SeedStream::Omega))
      .densify();
}

DenseMatrix range_finder_sketched(const DenseMatrix& a, const RangeFinderSpec& spec,
                                  StageTimings* elapsed) {
  spec.validate(a.rows(), a.cols());
  detail::Stopwatch clock;
  const sketch::SketchOperator s = primary_sketch(spec, a.cols());
  const DenseMatrix atil = s.apply_right(a);
  const DenseMatrix omega = starting_block(spec, spec.r1);
  const double sketch_ms = clock.lap();
  const DenseMatrix y = power_iterate(atil, omega, spec.q, spec.stabilized);
  const double iterate_ms = clock.lap();
  DenseMatrix q = linalg::orthonormalize(y);
  if (elapsed) *elapsed = {sketch_ms, iterate_ms, clock.lap()};
  return q;
}

DenseMatrix range_finder_classical(const DenseMatrix& a, std::size_t k, std::size_t r2,
                                   std::size_t q, std::uint64_t seed, bool stabilized) {
  RangeFinderSpec spec;
  spec.k = k;
  spec.l = k;
  spec.r1 = a.cols();
  spec.r2 = r2;
  spec.q = q;
  spec.seed = seed;
  spec.sketch_kind = sketch::SketchKind::identity();
  spec.stabilized = stabilized;
  return range_finder_sketched(a, spec);
}

linalg::SvdResult randsvd(const DenseMatrix& a, const DenseMatrix& q) {
  if (q.rows() != a.rows()) throw DimensionMismatch("randsvd: Q rows != A rows");
  linalg::SvdResult small = linalg::thin_svd(linalg::matmul_tn(q, a));
  small.U = linalg::matmul(q, small.U);
  return small;
}

FactorizationResult lowrank_factorize(const DenseMatrix& a, const RangeFinderSpec& spec) {
  spec.validate(a.rows(), a.cols());
  FactorizationResult out;
  detail::Stopwatch clock;
  const sketch::SketchOperator s1 = primary_sketch(spec, a.cols());
  const sketch::SketchOperator s2 = regression_sketch(spec, a.rows());
  const DenseMatrix atil = s1.apply_right(a);
  const DenseMatrix s2a = s2.apply_left_transpose(a);
  const DenseMatrix omega = starting_block(spec, spec.r1);
  out.elapsed.sketch_ms = clock.lap();

  out.Y = power_iterate(atil, omega, spec.q, spec.stabilized);
  out.elapsed.iterate_ms = clock.lap();

  const DenseMatrix coeff = linalg::pinv(s2.apply_left_transpose(out.Y));
  if (linalg::max_abs(coeff) == 0.0) throw NumericalError("lowrank_factorize: S2^T Y has numerical rank zero");
  out.X = linalg::matmul(coeff, s2a);
  out.elapsed.solve_ms = clock.lap();
  return out;
}

NystromResult nystrom_psd(const DenseMatrix& a, const RangeFinderSpec& spec, bool check_input) {
  if (a.rows() != a.cols()) throw DimensionMismatch("nystrom_psd: A must be square");
  if (check_input) {
    if (!linalg::is_symmetric(a, 1e-8)) throw NumericalError("nystrom_psd: A is not symmetric");
    const std::vector<double> ev = linalg::symmetric_eigenvalues(a);
    const double scale = std::max(std::abs(ev.front()), std::abs(ev.back()));
    if (ev.back() < -1e-8 * scale) throw NumericalError("nystrom_psd: A is not positive semidefinite");
  }
  spec.validate(a.rows(), a.cols());
  NystromResult out;
  detail::Stopwatch clock;
  const sketch::SketchOperator s = primary_sketch(spec, a.cols());
  const DenseMatrix ctil = s.apply_right(a);
  const DenseMatrix wtil = linalg::symmetrized(s.apply_left_transpose(ctil));
  const DenseMatrix omega = starting_block(spec, spec.r1);
  out.elapsed.sketch_ms = clock.lap();

  SymmetricPowerIteration it(wtil, omega, spec.stabilized);
  for (std::size_t i = 0; i < spec.q; ++i) it.step();
  out.elapsed.iterate_ms = clock.lap();

  const DenseMatrix& y = it.current();
  out.C = linalg::matmul(ctil, y);
  out.W = linalg::symmetrized(linalg::matmul_tn(y, linalg::matmul(wtil, y)));
  out.elapsed.solve_ms = clock.lap();
  return out;
}

DenseMatrix nystrom_reconstruct(const NystromResult& result) {
  const DenseMatrix cw = linalg::matmul(result.C, linalg::pinv(result.W));
  return linalg::symmetrized(linalg::matmul_nt(cw, result.C));
}

std::size_t choose_q(double eps, std::size_t m_hat) {
  if (!(eps > 0.0 && eps <= 0.5)) throw InvalidArgument("choose_q: eps must be in (0, 1/2]");
  if (m_hat < 1) throw InvalidArgument("choose_q: m_hat must be >= 1");
  return static_cast<std::size_t>(std::ceil(std::log(2.0 * static_cast<double>(m_hat)) / (2.0 * eps)));
}

}  // namespace skpower::power
