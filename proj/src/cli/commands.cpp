#include "cli/commands.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <map>
#include <optional>
#include <ostream>

#include "skpower/bench_protocol.hpp"
#include "skpower/data_io.hpp"
#include "skpower/diagnostics.hpp"
#include "skpower/error.hpp"
#include "skpower/linalg.hpp"
#include "skpower/power_methods.hpp"
#include "skpower/rng.hpp"
#include "skpower/sketch.hpp"

namespace skpower::cli {
namespace {

std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_matrix(const DenseMatrix& a, const std::string& path) {
  if (std::filesystem::path(path).extension() == ".mtx") {
    io::write_matrix_market(a, path);
  } else {
    io::write_binary(a, path);
  }
}

// -- gen ----------------------------------------------------------------------

struct GenArgs {
  std::string name;
  std::size_t m = 0, n = 0;
  std::uint64_t seed = 0;
  std::string out;
  double rate = 0.05;
  std::size_t rank = 0;
  double noise = 0.0;
  bool psd = false;
};

void add_gen(CLI::App& app, GenArgs& g) {
  app.add_option("name", g.name, "polydecay | expdecay | lowrank-plus-noise")
      ->required()
      ->check(CLI::IsMember({"polydecay", "expdecay", "lowrank-plus-noise"}));
  app.add_option("--m", g.m, "rows")->required();
  app.add_option("--n", g.n, "columns")->required();
  app.add_option("--seed", g.seed, "generator seed");
  app.add_option("--out", g.out, "output file (.mtx for Matrix Market, SKPW otherwise)")->required();
  app.add_option("--rate", g.rate, "expdecay rate");
  app.add_option("--rank", g.rank, "lowrank-plus-noise rank");
  app.add_option("--noise", g.noise, "lowrank-plus-noise noise level");
  app.add_flag("--psd", g.psd, "polydecay: symmetric psd U diag(n/i) U^T (needs m == n)");
}

int exec_gen(const GenArgs& g, std::ostream& out) {
  io::SyntheticSource src{g.name, g.m, g.n, g.seed, {}};
  if (g.name == "expdecay") src.params["rate"] = g.rate;
  if (g.name == "lowrank-plus-noise") {
    if (g.rank == 0) throw InvalidArgument("gen: lowrank-plus-noise needs --rank");
    src.params["rank"] = static_cast<double>(g.rank);
    src.params["noise"] = g.noise;
  }
  if (g.psd) src.params["psd"] = 1.0;
  const io::DatasetSpec spec{src, g.name};
  const DenseMatrix a = io::load_dataset(spec);
  write_matrix(a, g.out);
  const auto profile = diag::SpectralProfile::singular_values_of(a);
  out << "wrote " << g.out << " (" << a.rows() << "x" << a.cols() << ")\n";
  out << "sigma_max=" << real(profile.values.front()) << "\n";
  out << "sigma_min=" << real(profile.values.back()) << "\n";
  out << "frobenius=" << real(linalg::frobenius_norm(a)) << "\n";
  out << "numerical_rank=" << profile.numerical_rank() << "\n";
  out << "leading=";
  for (std::size_t i = 0; i < std::min<std::size_t>(5, profile.size()); ++i) {
    out << (i ? "," : "") << real(profile.values[i]);
  }
  out << "\n";
  return kExitOk;
}

// -- run ----------------------------------------------------------------------

struct RunArgs {
  std::string input;
  std::string method = "sketched-randsvd";
  std::size_t k = 0;
  std::optional<std::size_t> l, r1, r2, q, s;
  double eps = 0.5;
  std::string sketch = "countsketch";
  double c = sketch::kDefaultSizeConstant;
  std::string regime = "b";
  double delta = 0.1;
  std::uint64_t seed = 0;
  bool unstabilized = false;
  std::string save;
};

void add_run(CLI::App& app, RunArgs& r) {
  app.add_option("--input", r.input, "matrix file or dataset spec (e.g. polydecay:400x200:7)")->required();
  app.add_option("--method", r.method,
                 "classical-randsvd | sketched-randsvd | lowrank-factorize | "
                 "lowrank-factorize-unsketched | nystrom");
  app.add_option("--k", r.k, "target rank")->required();
  app.add_option("--l", r.l, "intermediate rank; derives r1 from the sketch size rule");
  app.add_option("--eps", r.eps, "nominal accuracy in (0, 1/2]");
  app.add_option("--r1", r.r1, "explicit primary sketch size");
  app.add_option("--r2", r.r2, "block size (default 2k)");
  app.add_option("--q", r.q, "power iterations (default choose_q(eps, min(m, r1)))");
  app.add_option("--sketch", r.sketch, "gaussian | sign | countsketch | srht | identity");
  app.add_option("--s", r.s, "CountSketch non-zeros per row (default: sizing rule)");
  app.add_option("--c", r.c, "sketch size constant");
  app.add_option("--regime", r.regime, "CountSketch sizing regime a | b")->check(CLI::IsMember({"a", "b"}));
  app.add_option("--delta", r.delta, "failure probability for the sizing rule");
  app.add_option("--seed", r.seed, "root seed");
  app.add_flag("--unstabilized", r.unstabilized, "skip re-orthonormalization between steps");
  app.add_option("--save", r.save, "write factors to <prefix>.Y.skpw and <prefix>.X.skpw (A ~ Y X)");
}

int exec_run(const RunArgs& r, std::ostream& out) {
  const DenseMatrix a = io::load_dataset(io::parse_dataset(r.input));
  const std::size_t m = a.rows(), n = a.cols();
  const bench::Method method = bench::parse_method(r.method);
  sketch::SketchKind kind{sketch::parse_family(r.sketch), r.s.value_or(1)};
  const auto regime = r.regime == "a" ? sketch::CountSketchRegime::A : sketch::CountSketchRegime::B;

  power::RangeFinderSpec spec;
  if (method == bench::Method::ClassicalRandsvd) {
    spec.k = r.k;
    spec.l = r.l.value_or(r.k);
    spec.r1 = n;
    spec.sketch_kind = sketch::SketchKind::identity();
    spec.eps = r.eps;
    spec.q = r.q.value_or(power::choose_q(r.eps, std::min(m, n)));
  } else if (r.r1) {
    spec.k = r.k;
    spec.l = r.l.value_or(r.k);
    spec.r1 = *r.r1;
    spec.eps = r.eps;
    spec.sketch_kind = kind;
    spec.q = r.q.value_or(power::choose_q(r.eps, std::min(m, *r.r1)));
  } else {
    if (!r.l) throw InvalidArgument("run: give either --l (derived sizes) or --r1");
    spec = power::RangeFinderSpec::from_accuracy(m, n, r.k, *r.l, r.eps, kind, r.seed, r.c, regime,
                                                 r.delta, r.s.has_value());
    if (r.q) spec.q = *r.q;
  }
  spec.r2 = r.r2.value_or(2 * r.k);
  spec.seed = r.seed;
  spec.stabilized = !r.unstabilized;
  if (method == bench::Method::LowrankFactorizeUnsketched) {
    spec.regression_kind = spec.sketch_kind;
    spec.regression_dim = spec.r1;
    spec.sketch_kind = sketch::SketchKind::identity();
    spec.r1 = n;
  }
  spec.validate(m, n);

  DenseMatrix y, x;
  power::StageTimings t;
  switch (method) {
    case bench::Method::ClassicalRandsvd:
    case bench::Method::SketchedRandsvd: {
      const DenseMatrix q = power::range_finder_sketched(a, spec, &t);
      const auto start = std::chrono::steady_clock::now();
      linalg::SvdResult svd = power::randsvd(a, q);
      t.solve_ms += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      y = linalg::scale_columns(svd.U, svd.sigma);
      x = svd.V.transposed();
      break;
    }
    case bench::Method::LowrankFactorize:
    case bench::Method::LowrankFactorizeUnsketched: {
      power::FactorizationResult f = power::lowrank_factorize(a, spec);
      y = std::move(f.Y);
      x = std::move(f.X);
      t = f.elapsed;
      break;
    }
    case bench::Method::Nystrom: {
      const power::NystromResult f = power::nystrom_psd(a, spec);
      y = linalg::matmul(f.C, linalg::pinv(f.W));
      x = f.C.transposed();
      t = f.elapsed;
      break;
    }
  }

  const linalg::MatrixNorms res = diag::factorization_residuals(a, y, x);
  const auto profile = diag::SpectralProfile::singular_values_of(a);
  bool normalized = false;
  const double rel = diag::relative_error_guarded(res.spectral, spec.k, profile, &normalized);

  out << "method=" << bench::method_name(method) << " m=" << m << " n=" << n << " k=" << spec.k
      << " l=" << spec.l << " r1=" << spec.r1 << " r2=" << spec.r2 << " q=" << spec.q
      << " sketch=" << sketch::to_string(spec.sketch_kind) << " seed=" << spec.seed << "\n";
  out << "spec_err=" << real(res.spectral) << "\n";
  out << "frob_err=" << real(res.frobenius) << "\n";
  out << "rel_err=" << real(rel) << "\n";
  if (normalized) out << "note: sigma_{k+1} is numerically zero; rel_err is spec_err / sigma_1\n";
  out << "sketch_ms=" << real(t.sketch_ms) << " iterate_ms=" << real(t.iterate_ms)
      << " solve_ms=" << real(t.solve_ms) << "\n";
  if (!r.save.empty()) {
    io::write_binary(y, r.save + ".Y.skpw");
    io::write_binary(x, r.save + ".X.skpw");
    out << "saved " << r.save << ".Y.skpw " << r.save << ".X.skpw\n";
  }
  return kExitOk;
}

// -- verify -------------------------------------------------------------------

struct VerifyArgs {
  std::string input;
  std::string sketch = "gaussian";
  std::optional<std::size_t> s, r;
  double c = 8.0;
  std::string regime = "b";
  std::size_t k = 0;
  double eps = 0.5;
  double delta = 0.1;
  std::size_t trials = 20;
  std::uint64_t seed = 0;
  double threshold = 0.9;
  std::optional<double> lambda;
};

void add_verify(CLI::App& app, VerifyArgs& v) {
  app.add_option("--input", v.input, "matrix file or dataset spec")->required();
  app.add_option("--sketch", v.sketch, "gaussian | sign | countsketch | srht | identity");
  app.add_option("--s", v.s, "CountSketch non-zeros per row (default: sizing rule)");
  app.add_option("--r", v.r, "explicit sketch size (default: sizing rule with --c)");
  app.add_option("--c", v.c, "sketch size constant");
  app.add_option("--regime", v.regime, "CountSketch sizing regime a | b")->check(CLI::IsMember({"a", "b"}));
  app.add_option("--k", v.k, "rank defining lambda = lambda_k")->required();
  app.add_option("--eps", v.eps, "accuracy to certify")->required();
  app.add_option("--delta", v.delta, "failure probability for the sizing rule");
  app.add_option("--trials", v.trials, "seeded sketches to certify");
  app.add_option("--seed", v.seed, "root seed");
  app.add_option("--threshold", v.threshold, "pass rate needed for exit status 0");
  app.add_option("--lambda", v.lambda, "regularization (default lambda_k)");
}

int exec_verify(const VerifyArgs& v, std::ostream& out, std::ostream& err) {
  const DenseMatrix a = io::load_dataset(io::parse_dataset(v.input));
  if (a.rows() > kVerifyMaxRows) {
    err << "error: verify whitens an m x m Gram matrix and is capped at m <= " << kVerifyMaxRows
        << " rows (got " << a.rows() << "); truncate the matrix to its first " << kVerifyMaxRows
        << " rows or a row sample first\n";
    return kExitRuntime;
  }
  if (v.trials < 1) throw InvalidArgument("verify: --trials must be >= 1");
  const std::size_t n = a.cols();
  sketch::SketchKind kind{sketch::parse_family(v.sketch), v.s.value_or(1)};
  std::size_t r = 0;
  if (kind.family == sketch::SketchFamily::Identity) {
    r = n;
  } else if (v.r) {
    r = *v.r;
  } else {
    const auto size = sketch::sketch_size(kind.family, v.k, v.eps, v.delta, v.c,
                                          v.regime == "a" ? sketch::CountSketchRegime::A
                                                          : sketch::CountSketchRegime::B,
                                          n);
    r = size.r;
    if (kind.family == sketch::SketchFamily::CountSketch && !v.s) kind.nnz_per_row = std::min(size.s, r);
  }
  const auto profile = diag::SpectralProfile::singular_values_of(a);
  const double lambda = v.lambda.value_or(diag::lambda_k(profile, v.k));
  const diag::RegularizedWhitener whitener(a, lambda);
  std::size_t passed = 0;
  double worst = 0.0;
  for (std::size_t t = 0; t < v.trials; ++t) {
    const auto s = sketch::make_sketch(kind, n, r, derive_seed(v.seed, t));
    const diag::BoundReport rep = whitener.certify(s.apply_right(a), v.eps);
    passed += rep.holds ? 1 : 0;
    worst = std::max(worst, rep.measured);
  }
  const double rate = static_cast<double>(passed) / static_cast<double>(v.trials);
  out << "sketch=" << sketch::to_string(kind) << " r=" << r << " k=" << v.k << " eps=" << real(v.eps)
      << " lambda=" << real(lambda) << " trials=" << v.trials << "\n";
  out << "passed=" << passed << "/" << v.trials << "\n";
  out << "pass_rate=" << real(rate) << "\n";
  out << "worst_whitened_norm=" << real(worst) << "\n";
  return rate >= v.threshold ? kExitOk : kExitBelowThreshold;
}

// -- bench --------------------------------------------------------------------

struct BenchArgs {
  std::string config;
  std::map<std::string, std::string> flags;
};

void add_bench(CLI::App& app, BenchArgs& b) {
  app.add_option("--config", b.config, "flat key = value file; flags override it");
  auto flag = [&](const std::string& name, const std::string& key, const std::string& help) {
    app.add_option_function<std::string>(name, [&b, key](const std::string& v) { b.flags[key] = v; }, help);
  };
  flag("--dataset", "dataset", "dataset spec or matrix file");
  flag("--methods", "methods", "comma-separated methods");
  flag("--k", "k", "target rank");
  flag("--l", "l_values", "comma-separated l values");
  flag("--r2", "r2", "block size (default k)");
  flag("--eps", "eps", "nominal accuracy recorded with each row");
  flag("--q-max", "q_max", "iterate cap for every method");
  flag("--q-max-sketched", "q_max_sketched", "iterate cap for sketched methods (default 15)");
  flag("--q-max-classical", "q_max_classical", "iterate cap for unsketched methods (default 5)");
  flag("--trials", "trials", "trials per (method, l)");
  flag("--seed", "root_seed", "root seed");
  flag("--sketch", "sketch_kind", "sketch family");
  flag("--s", "s", "CountSketch non-zeros per row");
  flag("--out", "output_path", "CSV output path");
  flag("--timing-threads", "timing_threads", "thread cap while timing");
  flag("--residual-tol", "residual_tol", "tolerance of the residual norm estimate");
  app.add_flag_callback("--parallel-trials", [&b] { b.flags["parallel_trials"] = "1"; },
                        "run trials concurrently (timings not comparable)");
  app.add_flag_callback("--unstabilized", [&b] { b.flags["stabilized"] = "0"; },
                        "skip re-orthonormalization between steps");
}

int exec_bench(const BenchArgs& b, std::ostream& out) {
  std::map<std::string, std::string> settings;
  if (!b.config.empty()) settings = bench::read_key_values(b.config);
  for (const auto& [key, value] : b.flags) settings[key] = value;
  if (settings.count("dataset") == 0) throw InvalidArgument("bench: a dataset is required");
  const bench::BenchConfig config = bench::apply_settings(settings);
  if (config.output_path.empty()) throw InvalidArgument("bench: an output path is required");
  config.validate();

  const DenseMatrix a = io::load_dataset(config.dataset);
  const auto profile = diag::SpectralProfile::singular_values_of(a);
  io::RecordWriter writer(config.output_path);
  const auto records = bench::run_benchmark(config, a, profile, &writer);
  out << "wrote " << writer.rows_written() << " rows to " << config.output_path.string() << "\n";
  for (bench::Method method : config.methods) {
    for (std::size_t l : config.l_values) {
      const auto curve = bench::mean_curve(records, bench::method_name(method), l);
      if (curve.empty()) continue;
      const auto reach = bench::time_to_reach(curve, 0.1);
      out << bench::method_name(method) << " l=" << l << " final_rel_err=" << real(curve.back().mean_rel_err)
          << " final_time_ms=" << real(curve.back().mean_time_ms)
          << " time_to_0.1_ms=" << (reach ? real(*reach) : std::string("never")) << "\n";
    }
  }
  return kExitOk;
}

std::vector<std::string> with_prefix(const char* sub, const std::vector<std::string>& args) {
  std::vector<std::string> argv{"skpower", sub};
  argv.insert(argv.end(), args.begin(), args.end());
  return argv;
}

}  // namespace

int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sketched power method toolkit", "skpower"};
  app.require_subcommand(1);
  GenArgs gen_args;
  RunArgs run_args;
  VerifyArgs verify_args;
  BenchArgs bench_args;
  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic matrix");
  CLI::App* run = app.add_subcommand("run", "run one algorithm once");
  CLI::App* bench_cmd = app.add_subcommand("bench", "error-vs-time benchmark to CSV");
  CLI::App* verify = app.add_subcommand("verify", "certify regularized spectral approximation");
  add_gen(*gen, gen_args);
  add_run(*run, run_args);
  add_bench(*bench_cmd, bench_args);
  add_verify(*verify, verify_args);

  std::vector<const char*> cargv;
  cargv.reserve(argv.size());
  for (const auto& a : argv) cargv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return kExitOk;
    err << app.help();
    return kExitUsage;
  }

  try {
    if (*gen) return exec_gen(gen_args, out);
    if (*run) return exec_run(run_args, out);
    if (*bench_cmd) return exec_bench(bench_args, out);
    if (*verify) return exec_verify(verify_args, out, err);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

int cmd_gen(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return run_cli(with_prefix("gen", args), out, err);
}
int cmd_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return run_cli(with_prefix("run", args), out, err);
}
int cmd_bench(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return run_cli(with_prefix("bench", args), out, err);
}
int cmd_verify(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return run_cli(with_prefix("verify", args), out, err);
}

}  // namespace skpower::cli
