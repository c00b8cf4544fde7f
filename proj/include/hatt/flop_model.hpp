#pragma once

// Closed-form leading-order operation counts for recompressing Y (.) Z, with
// uniform ranks r (Y), s (Z), l (targets) and mode size n.
//
//   partial-contraction-rl  (d-2) n (2 r s l^2 + 2 r^2 s^2 l)
//   hpcrl-1                 (d-2)[n R (2r^2 s + 2 s^2 r + 2 r s l + 2 l^2 - 2 r s) - r s l] + SVD
//   hpcrl-2                 (d-2)[n l (2r^2 s + 2 s^2 r + 2 r s l + l - 2 r s) - r s l]
//   tt-rounding             (d-2) n (5 r^3 s^3 + 6 r^2 s^2 l + 2 r s l^2)
//   orth-rand               (d-2) n (5 r^3 s^3 + 2 r^2 s^2 l + 4 r s l^2)
//   rand-orth               (d-2) n (4 r^2 s^2 l + 6 r s l^2)
//   two-sided               (d-2) n (6 r^2 s^2 l + 6 r s l^2)
//   hatt-1                  (d-2) n r s R^ (4r + 4s + 4l + 2 l^2 / R^) + SVD,   R^ = (R + l) / 2
//   hatt-2                  (d-2) n r s l (4r + 4s + 6l)
//
// R is the number of retained rank-1 terms. The SVD term is only known up to a
// constant; it is evaluated with the kernel bucket kSvdFlopFactor * r s l^2 per
// core and the result is flagged approximate.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "hatt/tensor.hpp"

namespace hatt {

struct FlopModelParams {
  Index d = 0;
  Index n = 0;
  Index r = 0;
  Index s = 0;
  Index ell = 0;
  /// Retained rank-1 terms R (hatt-1, hpcrl-1). Defaults to l.
  std::optional<double> terms;
};

struct FlopModelDetail {
  std::int64_t leading = 0;
  std::int64_t svd_bucket = 0;
  bool approximate = false;
  std::int64_t total() const { return leading + svd_bucket; }
};

FlopModelDetail flop_model_detail(std::string_view algorithm, const FlopModelParams& p);
/// leading + svd_bucket. Unknown names and non-positive sizes raise UsageError.
std::int64_t flop_model(std::string_view algorithm, const FlopModelParams& p);

const std::vector<std::string_view>& flop_model_names();

/// Smallest l in [lo, hi] with flop_model("hatt-1") < flop_model("hatt-2"), if any.
std::optional<Index> hatt_crossover(Index d, Index n, Index r, Index s, double terms, Index lo,
                                    Index hi);

}  // namespace hatt
