#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

#include "skpower/data_io.hpp"
#include "skpower/error.hpp"

namespace skpower::io {
namespace {

constexpr std::array<char, 4> kMagic{'S', 'K', 'P', 'W'};
constexpr std::size_t kHeaderBytes = 4 + 1 + 8 + 8;

void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int b = 7; b >= 0; --b) v = (v << 8) | p[b];
  return v;
}

}  // namespace

void write_binary(const DenseMatrix& a, const std::filesystem::path& path) {
  std::vector<unsigned char> bytes;
  bytes.reserve(kHeaderBytes + 8 * a.size());
  bytes.insert(bytes.end(), kMagic.begin(), kMagic.end());
  bytes.push_back(kBinaryVersion);
  put_u64(bytes, a.rows());
  put_u64(bytes, a.cols());
  for (double v : a.data()) put_u64(bytes, std::bit_cast<std::uint64_t>(v));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

DenseMatrix read_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < kHeaderBytes) throw IoError(path.string() + ": truncated header");
  if (std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) throw IoError(path.string() + ": bad magic");
  if (bytes[4] != kBinaryVersion) {
    throw IoError(path.string() + ": unsupported format version " + std::to_string(bytes[4]));
  }
  const std::uint64_t rows = get_u64(bytes.data() + 5);
  const std::uint64_t cols = get_u64(bytes.data() + 13);
  if (cols != 0 && rows > std::numeric_limits<std::uint64_t>::max() / 8 / cols) {
    throw IoError(path.string() + ": dimensions overflow");
  }
  const std::uint64_t count = rows * cols;
  if (bytes.size() != kHeaderBytes + 8 * count) {
    throw IoError(path.string() + ": expected " + std::to_string(kHeaderBytes + 8 * count) +
                  " bytes, found " + std::to_string(bytes.size()));
  }
  std::vector<double> data(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    data[i] = std::bit_cast<double>(get_u64(bytes.data() + kHeaderBytes + 8 * i));
  }
  try {
    return DenseMatrix(rows, cols, std::move(data));
  } catch (const InvalidArgument& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

DenseMatrix read_matrix_file(const std::filesystem::path& path) {
  if (path.extension() == ".mtx") return read_matrix_market(path);
  return read_binary(path);
}

}  // namespace skpower::io
