#pragma once

// Recompression of TT tensors and of implicit Hadamard products.
//
// Rank index convention for Hadamard ranks: the pair (alpha, beta) of a
// Y-rank and a Z-rank is the zero-based row/column alpha * s + beta, matching
// pkp_cores. Every sketch matrix W^(k) of a Hadamard product has r_k s_k rows
// in that order.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hatt/linalg.hpp"
#include "hatt/tt.hpp"

namespace hatt {

enum class Algorithm { tt_rounding, rand_orth, hatt1, hatt2 };

/// "tt-rounding", "rand-orth", "hatt-1", "hatt-2".
std::string_view algorithm_name(Algorithm a);
/// Inverse of algorithm_name; unknown names raise UsageError.
Algorithm parse_algorithm(std::string_view name);

/// Partial contraction matrices W^(1)..W^(d-1).
struct SketchSet {
  std::vector<Matrix> w;  ///< w[k - 1] holds W^(k)

  std::size_t size() const { return w.size(); }
  const Matrix& at(std::size_t k) const;  ///< W^(k), 1-based
};

struct Rank1Rep {
  Matrix u;      ///< (r s) x R
  Vector sigma;  ///< R nonnegative weights
  Matrix v;      ///< l x R
  Index terms = 0;
  bool identity_weights = false;  ///< direct form: sigma = 1, v = I
};

struct HpcrlVariant {
  enum class Kind { svd, direct };
  Kind kind = Kind::direct;
  std::optional<Index> max_terms;
  double rel_tol = 1e-10;

  static HpcrlVariant direct() { return {}; }
  static HpcrlVariant svd(std::optional<Index> max_terms = std::nullopt, double rel_tol = 1e-10);
};

/// Receives warnings such as target clamping. Defaults to standard error.
using WarningHandler = std::function<void(const std::string&)>;
void set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

/// Feasible target chain for an input with rank chain `input_ranks`:
///   l_k <- min(l_k, input_ranks[k], l_{k-1} n_k)  left to right,
///   l_k <- min(l_k, n_{k+1} l_{k+1})              right to left.
/// Emits one warning when anything changed. Malformed chains raise ShapeError.
std::vector<Index> clamp_targets(const Shape& shape, const std::vector<Index>& input_ranks,
                                 const std::vector<Index>& targets, bool warn_on_clamp = true);

/// Deterministic rounding: right-to-left LQ orthogonalization, then left-to-right
/// QR + truncated SVD. Output cores 1..d-1 are left-orthogonal.
TTTensor tt_rounding(const TTTensor& a, const std::vector<Index>& targets, FlopLedger& ledger);

/// Right-to-left partial contractions of A against the sketch tensor R.
SketchSet partial_contraction_rl(const TTTensor& a, const TTTensor& r, FlopLedger& ledger);
/// Same sketches through the slice sum W^(k-1) = sum_i A(i) W^(k) R(i)^T (reference path).
SketchSet partial_contraction_rl_slices(const TTTensor& a, const TTTensor& r, FlopLedger& ledger);

/// Randomize-then-orthogonalize with a gaussian sketch drawn from (seed, targets).
TTTensor rand_orth(const TTTensor& a, const std::vector<Index>& targets, std::uint64_t seed,
                   FlopLedger& ledger);
/// Same sweep with a caller-supplied sketch; R's ranks are used as targets as given.
TTTensor rand_orth(const TTTensor& a, const TTTensor& sketch, FlopLedger& ledger);

Rank1Rep rank1_decompose(const Matrix& w, const HpcrlVariant& variant, FlopLedger& ledger);

/// Sketches of the implicit product Y (.) Z against R without forming any PKP core.
/// The truncated form of W^(k) only drives the propagation to W^(k-1); the
/// returned W^(k) are the propagated matrices themselves.
SketchSet hpcrl(const TTTensor& y, const TTTensor& z, const TTTensor& r,
                const HpcrlVariant& variant, FlopLedger& ledger,
                std::vector<Index>* terms_used = nullptr);

/// M * (Y(i) kron Z(i)) for every slice i, as a core of extents l x n x (r' s').
TTCore contract_m_onto_pkp(const Matrix& m, const TTCore& y, const TTCore& z, FlopLedger& ledger,
                           const ResourceLimits& limits = ResourceLimits{});

struct HattStats {
  /// Rank-1 terms used to propagate W^(k), k = 2..d-1 (index k - 2).
  std::vector<Index> terms;
  double mean_terms() const;
};

/// Hadamard-avoiding recompression of Y (.) Z to the target chain. Every
/// core built on the way is checked against limits.max_core_elements.
TTTensor hatt(const TTTensor& y, const TTTensor& z, const std::vector<Index>& targets,
              const HpcrlVariant& variant, std::uint64_t seed, FlopLedger& ledger,
              const ResourceLimits& limits = ResourceLimits{}, HattStats* stats = nullptr);
/// Same sweep with a caller-supplied sketch.
TTTensor hatt(const TTTensor& y, const TTTensor& z, const TTTensor& sketch,
              const HpcrlVariant& variant, FlopLedger& ledger,
              const ResourceLimits& limits = ResourceLimits{}, HattStats* stats = nullptr);

struct RecompressOptions {
  Algorithm algorithm = Algorithm::hatt2;
  std::uint64_t seed = 0;
  /// Used by hatt-1 only; hatt-2 always runs the direct variant.
  HpcrlVariant svd_variant = HpcrlVariant::svd();
  ResourceLimits limits{};
  bool warn_on_clamp = true;
};

struct RecompressReport {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::vector<Index> output_ranks;
  std::optional<double> rel_error;
  double wall_time_s = 0.0;
  FlopLedger flops_measured;
  std::int64_t flops_predicted = 0;
};

struct RecompressResult {
  TTTensor tensor;
  RecompressReport report;
};

/// Recompresses Y (.) Z with the selected algorithm. Baselines materialize
/// tt_hadamard first, subject to limits.max_core_elements. The report's
/// rel_error is left empty. flops_predicted evaluates flop_model with
/// n, r, s, l taken as the maxima over the chains and, for hatt-1, R as the
/// mean number of retained terms.
RecompressResult recompress_hadamard(const TTTensor& y, const TTTensor& z,
                                     const std::vector<Index>& targets,
                                     const RecompressOptions& options);

}  // namespace hatt
