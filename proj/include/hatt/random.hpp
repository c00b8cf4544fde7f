#pragma once

// Seeded random TT tensors.
//
// Generator: std::mt19937_64. Core k (1-based) draws from its own sub-stream
// seeded with substream_seed(seed, k), so the values of core k depend only on
// (seed, k, core extents) and not on the order d. Entries are drawn in the
// core's storage order (alpha fastest, then i, then beta).

#include <cstdint>
#include <vector>

#include "hatt/tt.hpp"

namespace hatt {

enum class Distribution { gaussian, uniform };

struct RandomSpec {
  Shape shape;
  std::vector<Index> ranks;  ///< l_0 = 1, ..., l_d = 1
  Distribution kind = Distribution::gaussian;
  std::uint64_t seed = 0;
};

/// SplitMix64 mix of (seed, stream).
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream);

/// Gaussian: i.i.d. N(0, 1 / (l_{k-1} n_k l_k)) entries in core k.
/// Uniform: i.i.d. U[0, 1] entries.
TTTensor random_tt(const RandomSpec& spec);

/// Throws ShapeError unless `ranks` is a valid chain for `shape`.
void validate_rank_chain(const Shape& shape, const std::vector<Index>& ranks);

}  // namespace hatt
