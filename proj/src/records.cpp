#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "skpower/data_io.hpp"
#include "skpower/error.hpp"

namespace skpower::io {
namespace {

std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string records_csv_header() {
  return "method,dataset,m,n,k,l,r1,r2,s,q_iter,eps,seed,trial,time_ms,spec_err,frob_err,rel_err";
}

std::string to_csv_row(const TrialRecord& r) {
  std::ostringstream os;
  os << r.method << ',' << r.dataset << ',' << r.m << ',' << r.n << ',' << r.k << ',' << r.l << ','
     << r.r1 << ',' << r.r2 << ',' << r.s << ',' << r.q_iter << ',' << real(r.eps) << ',' << r.seed
     << ',' << r.trial << ',' << real(r.time_ms) << ',' << real(r.spec_err) << ','
     << real(r.frob_err) << ',' << real(r.rel_err);
  return os.str();
}

void write_records_csv(const std::vector<TrialRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << records_csv_header() << '\n';
  for (const auto& r : records) out << to_csv_row(r) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<TrialRecord> read_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != records_csv_header()) {
    throw IoError(path.string() + ":1: unexpected CSV header");
  }
  std::vector<TrialRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 17) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected 17 fields, got " +
                    std::to_string(f.size()));
    }
    try {
      TrialRecord r;
      r.method = f[0];
      r.dataset = f[1];
      std::size_t* counts[] = {&r.m, &r.n, &r.k, &r.l, &r.r1, &r.r2, &r.s, &r.q_iter};
      for (std::size_t i = 0; i < 8; ++i) *counts[i] = std::stoull(f[2 + i]);
      r.eps = std::stod(f[10]);
      r.seed = std::stoull(f[11]);
      r.trial = std::stoull(f[12]);
      r.time_ms = std::stod(f[13]);
      r.spec_err = std::stod(f[14]);
      r.frob_err = std::stod(f[15]);
      r.rel_err = std::stod(f[16]);
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": malformed field");
    }
  }
  validate_record_times(out);
  return out;
}

void validate_record_times(const std::vector<TrialRecord>& records) {
  using Key = std::tuple<std::string, std::string, std::size_t, std::size_t>;
  std::map<Key, const TrialRecord*> last;
  for (const auto& r : records) {
    const Key key{r.method, r.dataset, r.l, r.trial};
    auto it = last.find(key);
    if (it != last.end()) {
      const TrialRecord& prev = *it->second;
      if (r.q_iter <= prev.q_iter) {
        throw IoError("records: q_iter not increasing for " + r.method + " l=" + std::to_string(r.l) +
                      " trial=" + std::to_string(r.trial));
      }
      if (r.time_ms < prev.time_ms) {
        throw IoError("records: time_ms decreases for " + r.method + " l=" + std::to_string(r.l) +
                      " trial=" + std::to_string(r.trial) + " at q=" + std::to_string(r.q_iter));
      }
    }
    last[key] = &r;
  }
}

RecordWriter::RecordWriter(const std::filesystem::path& path) : path_(path) {
  std::ofstream out(path_, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path_.string());
  out << records_csv_header() << '\n';
  out.flush();
  if (!out) throw IoError("write failed: " + path_.string());
}

void RecordWriter::append(const std::vector<TrialRecord>& batch) {
  std::ofstream out(path_, std::ios::app);
  if (!out) throw IoError("cannot append to " + path_.string());
  for (const auto& r : batch) out << to_csv_row(r) << '\n';
  out.flush();
  if (!out) throw IoError("write failed: " + path_.string());
  rows_ += batch.size();
}

}  // namespace skpower::io
