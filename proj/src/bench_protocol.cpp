#include "skpower/bench_protocol.hpp"

#include <algorithm>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>

#include "skpower/error.hpp"
#include "skpower/linalg.hpp"
#include "skpower/power_methods.hpp"
#include "skpower/rng.hpp"
#include "skpower/threads.hpp"
#include "stopwatch.hpp"

namespace skpower::bench {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string part;
  std::istringstream ss(s);
  while (std::getline(ss, part, ',')) {
    part = trim(part);
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

std::size_t to_count(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
    const auto x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return static_cast<std::size_t>(x);
  } catch (const std::logic_error&) {
    throw InvalidArgument("config: '" + key + "' expects a non-negative integer, got '" + v + "'");
  }
}

double to_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::logic_error&) {
    throw InvalidArgument("config: '" + key + "' expects a number, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw InvalidArgument("config: '" + key + "' expects a boolean, got '" + v + "'");
}

// Everything a trial needs between iterates; the block iteration borrows
// `op` so the struct is kept in place.
struct TrialState {
  DenseMatrix op;          // A~ = AS, or A itself for the unsketched methods
  DenseMatrix s2a;         // S2^T A (factorization methods)
  std::optional<sketch::SketchOperator> s2;
  DenseMatrix ctil;        // Nystrom: A S
};

struct Finished {
  DenseMatrix y;
  DenseMatrix x;
};

}  // namespace

std::string method_name(Method method) {
  switch (method) {
    case Method::ClassicalRandsvd: return "classical-randsvd";
    case Method::SketchedRandsvd: return "sketched-randsvd";
    case Method::LowrankFactorize: return "lowrank-factorize";
    case Method::LowrankFactorizeUnsketched: return "lowrank-factorize-unsketched";
    case Method::Nystrom: return "nystrom";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::ClassicalRandsvd, Method::SketchedRandsvd, Method::LowrankFactorize,
                   Method::LowrankFactorizeUnsketched, Method::Nystrom}) {
    if (method_name(m) == name) return m;
  }
  throw InvalidArgument("unknown method '" + name + "'");
}

bool is_sketched(Method method) {
  return method == Method::SketchedRandsvd || method == Method::LowrankFactorize ||
         method == Method::Nystrom;
}

void BenchConfig::validate() const {
  dataset.validate();
  if (methods.empty()) throw InvalidArgument("bench: no methods selected");
  if (k < 1) throw InvalidArgument("bench: k must be >= 1");
  if (l_values.empty()) throw InvalidArgument("bench: no l values");
  for (std::size_t l : l_values) {
    if (l < k) throw InvalidArgument("bench: every l must be >= k (l=" + std::to_string(l) + ")");
  }
  if (trials < 1) throw InvalidArgument("bench: trials must be >= 1");
  if (block_size() < 1) throw InvalidArgument("bench: r2 must be >= 1");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("bench: eps must be in (0, 1)");
  if (sketch_kind.nnz_per_row < 1) throw InvalidArgument("bench: s must be >= 1");
  if (timing_threads < 1) throw InvalidArgument("bench: timing_threads must be >= 1");
  if (!(residual_tol > 0.0)) throw InvalidArgument("bench: residual_tol must be > 0");
}

std::size_t BenchConfig::iterate_cap(Method method) const {
  if (q_max) return *q_max;
  return is_sketched(method) ? q_max_sketched : q_max_classical;
}

BenchConfig apply_settings(const std::map<std::string, std::string>& settings, BenchConfig base) {
  for (const auto& [key, raw] : settings) {
    const std::string v = trim(raw);
    if (key == "dataset") {
      base.dataset = io::parse_dataset(v);
    } else if (key == "methods" || key == "method") {
      base.methods.clear();
      for (const auto& name : split_list(v)) base.methods.push_back(parse_method(name));
    } else if (key == "k") {
      base.k = to_count(key, v);
    } else if (key == "l_values" || key == "l") {
      base.l_values.clear();
      for (const auto& x : split_list(v)) base.l_values.push_back(to_count(key, x));
    } else if (key == "r2") {
      base.r2 = to_count(key, v);
    } else if (key == "eps") {
      base.eps = to_real(key, v);
    } else if (key == "q_max") {
      base.q_max = to_count(key, v);
    } else if (key == "q_max_sketched") {
      base.q_max_sketched = to_count(key, v);
    } else if (key == "q_max_classical") {
      base.q_max_classical = to_count(key, v);
    } else if (key == "trials") {
      base.trials = to_count(key, v);
    } else if (key == "root_seed" || key == "seed") {
      base.root_seed = to_count(key, v);
    } else if (key == "sketch_kind" || key == "sketch") {
      base.sketch_kind.family = sketch::parse_family(v);
    } else if (key == "s") {
      base.sketch_kind.nnz_per_row = to_count(key, v);
    } else if (key == "output_path" || key == "output" || key == "out") {
      base.output_path = v;
    } else if (key == "stabilized") {
      base.stabilized = to_bool(key, v);
    } else if (key == "parallel_trials") {
      base.parallel_trials = to_bool(key, v);
    } else if (key == "timing_threads") {
      base.timing_threads = static_cast<int>(to_count(key, v));
    } else if (key == "residual_tol") {
      base.residual_tol = to_real(key, v);
    } else {
      throw InvalidArgument("config: unknown key '" + key + "'");
    }
  }
  return base;
}

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw IoError(path.string() + ":" + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

std::uint64_t trial_seed(std::uint64_t root, std::size_t trial) noexcept {
  return derive_seed(root, static_cast<std::uint64_t>(trial));
}

std::vector<io::TrialRecord> run_trial(const DenseMatrix& a, const diag::SpectralProfile& profile,
                                       const BenchConfig& config, Method method, std::size_t l,
                                       std::size_t trial) {
  const std::size_t m = a.rows(), n = a.cols(), k = config.k, r2 = config.block_size();
  const std::uint64_t seed = trial_seed(config.root_seed, trial);
  if (method == Method::Nystrom && m != n) throw InvalidArgument("bench: nystrom needs a square psd matrix");
  if (l > std::min(m, n)) throw InvalidArgument("bench: l exceeds min(m, n)");

  power::RangeFinderSpec spec;
  spec.k = k;
  spec.l = l;
  spec.r2 = r2;
  spec.eps = config.eps;
  spec.seed = seed;
  spec.sketch_kind = config.sketch_kind;
  spec.stabilized = config.stabilized;
  const bool sketched_primary = is_sketched(method);
  if (sketched_primary) {
    spec.r1 = l;
  } else {
    spec.r1 = n;
    spec.sketch_kind = sketch::SketchKind::identity();
  }
  spec.regression_kind = config.sketch_kind;
  spec.regression_dim = l;

  io::TrialRecord base;
  base.method = method_name(method);
  base.dataset = config.dataset.label;
  base.m = m;
  base.n = n;
  base.k = k;
  base.l = l;
  base.r1 = spec.r1;
  base.r2 = r2;
  base.s = config.sketch_kind.family == sketch::SketchFamily::CountSketch ? config.sketch_kind.nnz_per_row : 0;
  base.eps = config.eps;
  base.seed = seed;
  base.trial = trial;

  detail::Stopwatch clock;
  TrialState st;
  const DenseMatrix omega = power::starting_block(spec, spec.r1);
  if (method == Method::Nystrom) {
    const sketch::SketchOperator s = power::primary_sketch(spec, n);
    st.ctil = s.apply_right(a);
    st.op = linalg::symmetrized(s.apply_left_transpose(st.ctil));
  } else {
    if (sketched_primary) {
      st.op = power::primary_sketch(spec, n).apply_right(a);
    }
    if (method == Method::LowrankFactorize || method == Method::LowrankFactorizeUnsketched) {
      st.s2.emplace(power::regression_sketch(spec, m));
      st.s2a = st.s2->apply_left_transpose(a);
    }
  }
  const DenseMatrix& iter_op = (sketched_primary || method == Method::Nystrom) ? st.op : a;
  std::optional<power::SubspaceIteration> sub;
  std::optional<power::SymmetricPowerIteration> sym;
  if (method == Method::Nystrom) {
    sym.emplace(st.op, omega, spec.stabilized);
  } else {
    sub.emplace(iter_op, omega, spec.stabilized);
  }
  double cumulative = clock.lap();

  auto finish = [&]() -> Finished {
    switch (method) {
      case Method::ClassicalRandsvd:
      case Method::SketchedRandsvd: {
        const DenseMatrix q = linalg::orthonormalize(sub->current());
        linalg::SvdResult svd = power::randsvd(a, q);
        return {linalg::scale_columns(svd.U, svd.sigma), svd.V.transposed()};
      }
      case Method::LowrankFactorize:
      case Method::LowrankFactorizeUnsketched: {
        const DenseMatrix& y = sub->current();
        const DenseMatrix coeff = linalg::pinv(st.s2->apply_left_transpose(y));
        return {y, linalg::matmul(coeff, st.s2a)};
      }
      case Method::Nystrom: {
        const DenseMatrix& y = sym->current();
        const DenseMatrix c = linalg::matmul(st.ctil, y);
        const DenseMatrix w = linalg::symmetrized(linalg::matmul_tn(y, linalg::matmul(st.op, y)));
        return {linalg::matmul(c, linalg::pinv(w)), c.transposed()};
      }
    }
    return {};
  };

  std::vector<io::TrialRecord> out;
  const std::size_t cap = config.iterate_cap(method);
  double worst_finish = 0.0;
  for (std::size_t q = 0; q <= cap; ++q) {
    clock.lap();
    if (q > 0) {
      if (sub) sub->step();
      if (sym) sym->step();
    }
    cumulative += clock.lap();
    const Finished f = finish();
    worst_finish = std::max(worst_finish, clock.lap());

    io::TrialRecord rec = base;
    rec.q_iter = q;
    rec.time_ms = cumulative + worst_finish;
    rec.spec_err = diag::estimate_residual_spectral(a, f.y, f.x, config.residual_tol);
    rec.frob_err = linalg::frobenius_norm(linalg::subtract(a, linalg::matmul(f.y, f.x)));
    rec.rel_err = diag::relative_error(rec.spec_err, k, profile);
    out.push_back(std::move(rec));
    clock.lap();
  }
  return out;
}

std::vector<io::TrialRecord> run_benchmark(const BenchConfig& config, const DenseMatrix& a,
                                           const diag::SpectralProfile& profile,
                                           io::RecordWriter* writer) {
  config.validate();
  std::vector<io::TrialRecord> all;
  for (Method method : config.methods) {
    for (std::size_t l : config.l_values) {
      std::vector<std::vector<io::TrialRecord>> per_trial(config.trials);
      if (config.parallel_trials) {
        std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t t = 0; t < static_cast<std::int64_t>(config.trials); ++t) {
          try {
            ScopedThreadLimit single(1);
            per_trial[static_cast<std::size_t>(t)] = run_trial(a, profile, config, method, l, static_cast<std::size_t>(t));
          } catch (...) {
#pragma omp critical(skpower_bench_failure)
            if (!failure) failure = std::current_exception();
          }
        }
        for (auto& rows : per_trial) {
          if (rows.empty()) continue;
          if (writer) writer->append(rows);
          all.insert(all.end(), rows.begin(), rows.end());
        }
        if (failure) std::rethrow_exception(failure);
      } else {
        ScopedThreadLimit limit(config.timing_threads);
        for (std::size_t t = 0; t < config.trials; ++t) {
          per_trial[t] = run_trial(a, profile, config, method, l, t);
          if (writer) writer->append(per_trial[t]);
          all.insert(all.end(), per_trial[t].begin(), per_trial[t].end());
        }
      }
    }
  }
  return all;
}

std::vector<CurvePoint> mean_curve(const std::vector<io::TrialRecord>& records,
                                   const std::string& method, std::size_t l) {
  std::map<std::size_t, CurvePoint> by_q;
  for (const auto& r : records) {
    if (r.method != method || r.l != l) continue;
    CurvePoint& p = by_q[r.q_iter];
    p.q = r.q_iter;
    p.mean_time_ms += r.time_ms;
    p.mean_rel_err += r.rel_err;
    ++p.samples;
  }
  std::vector<CurvePoint> out;
  for (auto& [q, p] : by_q) {
    p.mean_time_ms /= static_cast<double>(p.samples);
    p.mean_rel_err /= static_cast<double>(p.samples);
    out.push_back(p);
  }
  return out;
}

std::optional<double> time_to_reach(const std::vector<CurvePoint>& curve, double threshold) {
  for (const auto& p : curve) {
    if (p.mean_rel_err <= threshold) return p.mean_time_ms;
  }
  return std::nullopt;
}

}  // namespace skpower::bench
