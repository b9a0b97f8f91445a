#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "skpower/dense_matrix.hpp"

namespace skpower {

using Rng = std::mt19937_64;

/// Independent substream seed for `stream` under `root` (SplitMix64 mixing of
/// both words). Distinct (root, stream) pairs give unrelated generators.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) noexcept;

/// rows x cols matrix of i.i.d. N(0, stddev^2) entries, filled row-major.
DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed,
                            double stddev = 1.0);

}  // namespace skpower
