#include "skpower/sketch.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "skpower/error.hpp"
#include "skpower/kernels.hpp"
#include "skpower/linalg.hpp"
#include "skpower/rng.hpp"

namespace skpower::sketch {
namespace {

std::size_t next_pow2(std::size_t n) { return std::bit_ceil(std::max<std::size_t>(n, 1)); }

void require_cols(const DenseMatrix& a, std::size_t n, const char* what) {
  if (a.cols() != n) {
    throw DimensionMismatch(std::string(what) + ": A has " + std::to_string(a.cols()) +
                            " columns, sketch expects " + std::to_string(n));
  }
}

void require_rows(const DenseMatrix& a, std::size_t n, const char* what) {
  if (a.rows() != n) {
    throw DimensionMismatch(std::string(what) + ": A has " + std::to_string(a.rows()) +
                            " rows, sketch expects " + std::to_string(n));
  }
}

// Floyd's algorithm: `count` distinct values from [0, range).
void sample_distinct(Rng& gen, std::size_t range, std::size_t count, std::vector<std::uint32_t>& out) {
  out.clear();
  for (std::size_t j = range - count; j < range; ++j) {
    std::uniform_int_distribution<std::size_t> pick(0, j);
    const auto t = static_cast<std::uint32_t>(pick(gen));
    if (std::find(out.begin(), out.end(), t) == out.end()) {
      out.push_back(t);
    } else {
      out.push_back(static_cast<std::uint32_t>(j));
    }
  }
}

}  // namespace

std::string family_name(SketchFamily family) {
  switch (family) {
    case SketchFamily::Gaussian: return "gaussian";
    case SketchFamily::Sign: return "sign";
    case SketchFamily::CountSketch: return "countsketch";
    case SketchFamily::Srht: return "srht";
    case SketchFamily::Identity: return "identity";
  }
  return "unknown";
}

SketchFamily parse_family(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "gaussian") return SketchFamily::Gaussian;
  if (s == "sign" || s == "signsubgaussian") return SketchFamily::Sign;
  if (s == "countsketch" || s == "count-sketch" || s == "countsketchsparse") {
    return SketchFamily::CountSketch;
  }
  if (s == "srht") return SketchFamily::Srht;
  if (s == "identity") return SketchFamily::Identity;
  throw InvalidArgument("unknown sketch family '" + std::string(name) + "'");
}

std::string to_string(const SketchKind& kind) {
  if (kind.family == SketchFamily::CountSketch) {
    return "countsketch(s=" + std::to_string(kind.nnz_per_row) + ")";
  }
  return family_name(kind.family);
}

SketchOperator::SketchOperator(SketchKind kind, std::size_t n, std::size_t r, std::uint64_t seed)
    : kind_(kind), n_(n), r_(r), seed_(seed), n_pad_(n) {
  if (n < 1) throw InvalidArgument("sketch: input dimension must be >= 1");
  if (r < 1) throw InvalidArgument("sketch: sketch dimension must be >= 1");
  Rng gen(seed);
  switch (kind.family) {
    case SketchFamily::Gaussian:
      dense_ = std::make_shared<const DenseMatrix>(
          gaussian_matrix(n, r, seed, 1.0 / std::sqrt(static_cast<double>(r))));
      break;
    case SketchFamily::Sign: {
      DenseMatrix s(n, r);
      const double v = 1.0 / std::sqrt(static_cast<double>(r));
      std::uint64_t bits = 0;
      int left = 0;
      for (double& e : s.data()) {
        if (left == 0) {
          bits = gen();
          left = 64;
        }
        e = (bits & 1U) ? v : -v;
        bits >>= 1;
        --left;
      }
      dense_ = std::make_shared<const DenseMatrix>(std::move(s));
      break;
    }
    case SketchFamily::CountSketch: {
      const std::size_t s = kind.nnz_per_row;
      if (s < 1 || s > r) {
        throw InvalidArgument("countsketch: need 1 <= s <= r, got s=" + std::to_string(s) +
                              ", r=" + std::to_string(r));
      }
      if (r > std::numeric_limits<std::uint32_t>::max()) throw InvalidArgument("countsketch: r too large");
      columns_.reserve(n * s);
      values_.reserve(n * s);
      const double v = 1.0 / std::sqrt(static_cast<double>(s));
      std::vector<std::uint32_t> picked;
      for (std::size_t j = 0; j < n; ++j) {
        sample_distinct(gen, r, s, picked);
        for (std::uint32_t c : picked) {
          columns_.push_back(c);
          values_.push_back((gen() & 1U) ? v : -v);
        }
      }
      break;
    }
    case SketchFamily::Srht: {
      n_pad_ = next_pow2(n);
      if (r > n_pad_) {
        throw InvalidArgument("srht: r=" + std::to_string(r) + " exceeds padded dimension " +
                              std::to_string(n_pad_));
      }
      signs_.resize(n);
      for (double& d : signs_) d = (gen() & 1U) ? 1.0 : -1.0;
      // Partial Fisher-Yates over [0, n_pad).
      std::vector<std::uint32_t> perm(n_pad_);
      std::iota(perm.begin(), perm.end(), 0U);
      for (std::size_t i = 0; i < r; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n_pad_ - 1);
        std::swap(perm[i], perm[pick(gen)]);
      }
      sampled_.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(r));
      std::sort(sampled_.begin(), sampled_.end());
      break;
    }
    case SketchFamily::Identity:
      if (r != n) throw InvalidArgument("identity sketch: requires r == n");
      break;
  }
}

DenseMatrix SketchOperator::apply_right(const DenseMatrix& a) const {
  require_cols(a, n_, "apply_right");
  switch (kind_.family) {
    case SketchFamily::Gaussian:
    case SketchFamily::Sign: return linalg::matmul(a, *dense_);
    case SketchFamily::CountSketch: return countsketch_right(a);
    case SketchFamily::Srht: return srht_right(a);
    case SketchFamily::Identity: return a;
  }
  return {};
}

DenseMatrix SketchOperator::apply_left_transpose(const DenseMatrix& a) const {
  require_rows(a, n_, "apply_left_transpose");
  switch (kind_.family) {
    case SketchFamily::Gaussian:
    case SketchFamily::Sign: return linalg::matmul_tn(*dense_, a);
    case SketchFamily::CountSketch: return countsketch_left_transpose(a);
    case SketchFamily::Srht: return srht_left_transpose(a);
    case SketchFamily::Identity: return a;
  }
  return {};
}

DenseMatrix SketchOperator::countsketch_right(const DenseMatrix& a) const {
  const std::size_t m = a.rows(), s = kind_.nnz_per_row;
  DenseMatrix out(m, r_);
#pragma omp parallel for schedule(static)
  for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(m); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const auto arow = a.row(i);
    auto orow = out.row(i);
    for (std::size_t j = 0; j < n_; ++j) {
      const double x = arow[j];
      if (x == 0.0) continue;
      for (std::size_t t = j * s; t < (j + 1) * s; ++t) orow[columns_[t]] += x * values_[t];
    }
  }
  return out;
}

DenseMatrix SketchOperator::countsketch_left_transpose(const DenseMatrix& a) const {
  const std::size_t w = a.cols(), s = kind_.nnz_per_row;
  DenseMatrix out(r_, w);
  constexpr std::size_t kTile = 256;
  const auto tiles = static_cast<std::int64_t>((w + kTile - 1) / kTile);
#pragma omp parallel for schedule(static)
  for (std::int64_t jt = 0; jt < tiles; ++jt) {
    const std::size_t c0 = static_cast<std::size_t>(jt) * kTile;
    const std::size_t c1 = std::min(w, c0 + kTile);
    for (std::size_t j = 0; j < n_; ++j) {
      const double* arow = a.row(j).data();
      for (std::size_t t = j * s; t < (j + 1) * s; ++t) {
        double* orow = out.row(columns_[t]).data();
        const double v = values_[t];
#pragma omp simd
        for (std::size_t c = c0; c < c1; ++c) orow[c] += v * arow[c];
      }
    }
  }
  return out;
}

DenseMatrix SketchOperator::srht_right(const DenseMatrix& a) const {
  const std::size_t m = a.rows();
  const double scale = 1.0 / std::sqrt(static_cast<double>(r_));
  DenseMatrix out(m, r_);
#pragma omp parallel
  {
    std::vector<double> buf(n_pad_);
#pragma omp for schedule(static)
    for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(m); ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      const auto arow = a.row(i);
      for (std::size_t j = 0; j < n_; ++j) buf[j] = arow[j] * signs_[j];
      std::fill(buf.begin() + static_cast<std::ptrdiff_t>(n_), buf.end(), 0.0);
      kernels::fwht(buf);
      auto orow = out.row(i);
      for (std::size_t t = 0; t < r_; ++t) orow[t] = scale * buf[sampled_[t]];
    }
  }
  return out;
}

DenseMatrix SketchOperator::srht_left_transpose(const DenseMatrix& a) const {
  const std::size_t w = a.cols();
  const double scale = 1.0 / std::sqrt(static_cast<double>(r_));
  DenseMatrix buf(n_pad_, w);
  for (std::size_t j = 0; j < n_; ++j) {
    const auto arow = a.row(j);
    auto brow = buf.row(j);
    for (std::size_t c = 0; c < w; ++c) brow[c] = arow[c] * signs_[j];
  }
  kernels::fwht_columns(buf.data(), n_pad_, w);
  DenseMatrix out(r_, w);
  for (std::size_t t = 0; t < r_; ++t) {
    const auto brow = buf.row(sampled_[t]);
    auto orow = out.row(t);
    for (std::size_t c = 0; c < w; ++c) orow[c] = scale * brow[c];
  }
  return out;
}

DenseMatrix SketchOperator::densify() const {
  if (n_ * r_ > kDensifyCap) {
    throw InvalidArgument("densify: " + std::to_string(n_) + "x" + std::to_string(r_) +
                          " exceeds the densification cap");
  }
  switch (kind_.family) {
    case SketchFamily::Gaussian:
    case SketchFamily::Sign: return *dense_;
    case SketchFamily::Identity: return DenseMatrix::identity(n_);
    case SketchFamily::CountSketch: {
      DenseMatrix out(n_, r_);
      const std::size_t s = kind_.nnz_per_row;
      for (std::size_t t = 0; t < columns_.size(); ++t) out(t / s, columns_[t]) = values_[t];
      return out;
    }
    case SketchFamily::Srht: {
      DenseMatrix out(n_, r_);
      const double scale = 1.0 / std::sqrt(static_cast<double>(r_));
      for (std::size_t j = 0; j < n_; ++j) {
        for (std::size_t t = 0; t < r_; ++t) {
          const bool odd = std::popcount(static_cast<std::size_t>(j) & sampled_[t]) & 1;
          out(j, t) = signs_[j] * (odd ? -scale : scale);
        }
      }
      return out;
    }
  }
  return {};
}

SketchOperator make_sketch(SketchKind kind, std::size_t n, std::size_t r, std::uint64_t seed) {
  return SketchOperator(kind, n, r, seed);
}

SketchSize sketch_size(SketchFamily family, std::size_t k, double eps, double delta, double c,
                       CountSketchRegime regime, std::size_t n) {
  if (k < 1) throw InvalidArgument("sketch_size: k must be >= 1");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("sketch_size: eps must be in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("sketch_size: delta must be in (0, 1)");
  if (!(c > 0.0)) throw InvalidArgument("sketch_size: c must be > 0");
  const double kk = static_cast<double>(k);
  const double e2 = eps * eps;
  auto up = [](double x) { return static_cast<std::size_t>(std::ceil(x)); };
  switch (family) {
    case SketchFamily::Gaussian:
    case SketchFamily::Sign: return {up(c * (kk + std::log(1.0 / delta)) / e2), 1};
    case SketchFamily::CountSketch: {
      const double lk = std::log(kk / delta);
      if (regime == CountSketchRegime::A) {
        return {up(c * (kk + std::log(1.0 / (eps * delta))) / e2),
                up(c * (lk * lk / eps + lk * lk * lk))};
      }
      return {up(c * kk * lk / e2), up(c * lk / eps)};
    }
    case SketchFamily::Srht: {
      if (n < 1) throw InvalidArgument("sketch_size: srht needs the input dimension n");
      const double nn = static_cast<double>(n);
      return {up(c * (kk + std::log(nn / delta)) * std::log(kk / delta) / e2), 1};
    }
    case SketchFamily::Identity:
      if (n < 1) throw InvalidArgument("sketch_size: identity needs the input dimension n");
      return {n, 1};
  }
  return {};
}

}  // namespace skpower::sketch
