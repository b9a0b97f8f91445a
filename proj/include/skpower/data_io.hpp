#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "skpower/dense_matrix.hpp"

namespace skpower::io {

// -- Matrix Market ----------------------------------------------------------

/// Reads `array` or `coordinate` real/integer files, general or symmetric
/// (symmetric storage is mirrored). Errors carry the offending line number.
DenseMatrix read_matrix_market(const std::filesystem::path& path);
DenseMatrix read_matrix_market(std::istream& in, const std::string& source = "<stream>");

/// Writes `array real general` with 17 significant digits.
void write_matrix_market(const DenseMatrix& a, const std::filesystem::path& path);

// -- SKPW binary ------------------------------------------------------------
//
// "SKPW", version byte 1, u64 rows, u64 cols, rows*cols f64 row-major; all
// little-endian.

inline constexpr std::uint8_t kBinaryVersion = 1;

void write_binary(const DenseMatrix& a, const std::filesystem::path& path);
DenseMatrix read_binary(const std::filesystem::path& path);
/// Same as write_binary; name kept for cache-oriented call sites.
inline void binary_cache(const DenseMatrix& a, const std::filesystem::path& path) {
  write_binary(a, path);
}

/// Dispatches on extension: .mtx -> Matrix Market, anything else -> SKPW.
DenseMatrix read_matrix_file(const std::filesystem::path& path);

// -- synthetic generators ---------------------------------------------------

/// U diag(max(m,n)/i) V^T with Haar-random U (m x p) and V (n x p),
/// p = min(m, n).
DenseMatrix gen_polydecay(std::size_t m, std::size_t n, std::uint64_t seed);

/// U diag(n/i) U^T, the psd counterpart of gen_polydecay.
DenseMatrix gen_psd_polydecay(std::size_t n, std::uint64_t seed);

/// U diag(exp(-rate (i-1))) V^T.
DenseMatrix gen_expdecay(std::size_t m, std::size_t n, double rate, std::uint64_t seed);

/// U_r V_r^T + noise * G with Haar U_r, V_r and Gaussian G.
DenseMatrix gen_lowrank_plus_noise(std::size_t m, std::size_t n, std::size_t r, double noise,
                                   std::uint64_t seed);

/// U diag(sigma) V^T for a caller-supplied spectrum (length <= min(m, n)).
DenseMatrix gen_with_spectrum(std::size_t m, std::size_t n, const std::vector<double>& sigma,
                              std::uint64_t seed);

/// m x p matrix with orthonormal columns, Haar distributed: QR of a Gaussian
/// matrix with the R diagonal sign-fixed to be positive.
DenseMatrix haar_orthonormal(std::size_t m, std::size_t p, std::uint64_t seed);

// -- datasets ---------------------------------------------------------------

struct MatrixMarketSource {
  std::filesystem::path path;
};
struct BinarySource {
  std::filesystem::path path;
};
struct SyntheticSource {
  std::string name;  // polydecay | expdecay | lowrank-plus-noise
  std::size_t m = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  /// expdecay: rate; lowrank-plus-noise: rank, noise; polydecay: psd (0/1).
  std::map<std::string, double> params;
};

struct DatasetSpec {
  std::variant<MatrixMarketSource, BinarySource, SyntheticSource> source;
  std::string label;

  /// Throws InvalidArgument on unknown synthetic names or bad dimensions.
  void validate() const;
};

DenseMatrix load_dataset(const DatasetSpec& spec);

/// Parses "polydecay:400x200:7", "expdecay:300x300:1:rate=0.05",
/// "mtx:path", "bin:path" or a bare path.
DatasetSpec parse_dataset(const std::string& text);

// -- trial records ----------------------------------------------------------

struct TrialRecord {
  std::string method;
  std::string dataset;
  std::size_t m = 0, n = 0, k = 0, l = 0, r1 = 0, r2 = 0, s = 0, q_iter = 0;
  double eps = 0.0;
  std::uint64_t seed = 0;
  std::size_t trial = 0;
  double time_ms = 0.0;  // cumulative up to this iterate
  double spec_err = 0.0;
  double frob_err = 0.0;
  double rel_err = 0.0;

  bool operator==(const TrialRecord&) const = default;
};

std::string records_csv_header();
std::string to_csv_row(const TrialRecord& record);

/// Header plus one row per record; real fields use 17 significant digits.
void write_records_csv(const std::vector<TrialRecord>& records,
                       const std::filesystem::path& path);

/// Parses and validates: every (method, dataset, l, trial) group must have
/// increasing q_iter and non-decreasing time_ms.
std::vector<TrialRecord> read_records_csv(const std::filesystem::path& path);

/// Checks the time_ms monotonicity invariant; throws IoError when violated.
void validate_record_times(const std::vector<TrialRecord>& records);

/// Appending writer that flushes each batch, so partial results survive a
/// failure part-way through a benchmark.
class RecordWriter {
 public:
  explicit RecordWriter(const std::filesystem::path& path);
  void append(const std::vector<TrialRecord>& batch);
  std::size_t rows_written() const noexcept { return rows_; }

 private:
  std::filesystem::path path_;
  std::size_t rows_ = 0;
};

}  // namespace skpower::io
