#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "skpower/data_io.hpp"
#include "skpower/error.hpp"

namespace skpower::io {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  throw IoError(source + ":" + std::to_string(line) + ": " + what);
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

DenseMatrix read_matrix_market(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) fail(source, 1, "empty file");
  ++lineno;
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") fail(source, lineno, "missing %%MatrixMarket banner");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") fail(source, lineno, "unsupported object '" + object + "'");
  const bool coordinate = format == "coordinate";
  if (!coordinate && format != "array") fail(source, lineno, "unsupported format '" + format + "'");
  if (field != "real" && field != "integer" && field != "double") {
    fail(source, lineno, "unsupported field '" + field + "' (need real or integer)");
  }
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general") fail(source, lineno, "unsupported symmetry '" + symmetry + "'");

  // Skip comments to the size line.
  do {
    if (!std::getline(in, line)) fail(source, lineno + 1, "missing size line");
    ++lineno;
  } while (!line.empty() && line[0] == '%');
  while (blank(line)) {
    if (!std::getline(in, line)) fail(source, lineno + 1, "missing size line");
    ++lineno;
  }
  std::istringstream size_line(line);
  long long rows = -1, cols = -1, nnz = -1;
  size_line >> rows >> cols;
  if (coordinate) size_line >> nnz;
  if (!size_line || rows < 0 || cols < 0 || (coordinate && nnz < 0)) fail(source, lineno, "malformed size line");
  if (symmetric && rows != cols) fail(source, lineno, "symmetric matrix must be square");

  DenseMatrix a(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  const auto r = static_cast<std::size_t>(rows), c = static_cast<std::size_t>(cols);
  auto next_data_line = [&](std::string& out) -> bool {
    while (std::getline(in, out)) {
      ++lineno;
      if (out.empty() || out[0] == '%' || blank(out)) continue;
      return true;
    }
    return false;
  };
  auto parse_value = [&](std::istringstream& ss) {
    double v = 0.0;
    if (!(ss >> v)) fail(source, lineno, "malformed value");
    if (!std::isfinite(v)) fail(source, lineno, "non-finite value");
    return v;
  };

  if (coordinate) {
    for (long long e = 0; e < nnz; ++e) {
      if (!next_data_line(line)) fail(source, lineno, "expected " + std::to_string(nnz) + " entries, got " + std::to_string(e));
      std::istringstream ss(line);
      long long i = 0, j = 0;
      if (!(ss >> i >> j)) fail(source, lineno, "malformed entry");
      const double v = parse_value(ss);
      if (i < 1 || j < 1 || i > rows || j > cols) fail(source, lineno, "index out of bounds");
      const auto ii = static_cast<std::size_t>(i - 1), jj = static_cast<std::size_t>(j - 1);
      a(ii, jj) += v;
      if (symmetric && ii != jj) a(jj, ii) += v;
    }
  } else {
    for (std::size_t j = 0; j < c; ++j) {
      for (std::size_t i = symmetric ? j : 0; i < r; ++i) {
        if (!next_data_line(line)) fail(source, lineno, "too few array entries");
        std::istringstream ss(line);
        const double v = parse_value(ss);
        a(i, j) = v;
        if (symmetric) a(j, i) = v;
      }
    }
  }
  if (next_data_line(line)) fail(source, lineno, "unexpected trailing data");
  return a;
}

DenseMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_matrix_market(in, path.string());
}

void write_matrix_market(const DenseMatrix& a, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "%%MatrixMarket matrix array real general\n" << a.rows() << ' ' << a.cols() << '\n';
  char buf[32];
  for (std::size_t j = 0; j < a.cols(); ++j) {
    for (std::size_t i = 0; i < a.rows(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g\n", a(i, j));
      out << buf;
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace skpower::io
