#include "skpower/rng.hpp"

namespace skpower {
namespace {

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(root) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed,
                            double stddev) {
  DenseMatrix out(rows, cols);
  Rng gen(seed);
  std::normal_distribution<double> dist(0.0, stddev);
  for (double& v : out.data()) v = dist(gen);
  return out;
}

}  // namespace skpower
