#pragma once

// Test-problem generators, TT-SVD and the power iteration for the largest entry.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hatt/recompress.hpp"

namespace hatt {

/// Sequential SVD sweep with fixed target ranks (clipped to what each unfolding supports).
TTTensor tt_svd(const DenseTensor& x, const std::vector<Index>& targets, FlopLedger& ledger);
/// Sequential SVD sweep with per-step threshold rel_tol / sqrt(d - 1) * ||X||_F,
/// so that the reconstruction error is at most rel_tol * ||X||_F.
TTTensor tt_svd(const DenseTensor& x, double rel_tol, FlopLedger& ledger);

struct FourierSpec {
  Shape shape{8, 8, 8, 8, 8};
  Index harmonics = 60;  ///< J
  double coef_lo = 0.1;
  double coef_hi = 10.1;
  double rel_tol = 1e-12;
};

struct FourierPair {
  TTTensor y;  ///< sum_j a_j sin(j t)
  TTTensor z;  ///< sum_j b_j cos(j t)
  std::vector<double> a;
  std::vector<double> b;
};

/// Samples at t_i = 2 pi i / N, i = 1..N, N = numel(shape), folded by the
/// multi-index (sample i sits at linear index i) and converted by tt_svd.
FourierPair fourier_tt(const FourierSpec& spec, std::uint64_t seed, FlopLedger& ledger,
                       const ResourceLimits& limits = ResourceLimits{});

enum class SeparableKind { qing, alpine };

struct SeparableFunctionSpec {
  SeparableKind kind = SeparableKind::qing;
  Index d = 4;
  Index n = 10;
  double lo = -500.0;
  double hi = 500.0;
};

/// Spec with the standard bounds: qing [-500, 500], alpine [-2.5 pi, 2.5 pi].
SeparableFunctionSpec separable_spec(SeparableKind kind, Index d, Index n);
SeparableKind parse_separable_kind(std::string_view name);
std::string_view separable_kind_name(SeparableKind kind);

/// Grid point x_j = lo + (j - 1)(hi - lo)/(n - 1), 1 <= j <= n.
double grid_point(const SeparableFunctionSpec& spec, Index j);
/// g_i(x): qing (x - i)^2, alpine |x sin x + 0.1 x|; i is the 1-based mode.
double separable_term(SeparableKind kind, Index i, double x);

/// Sum of d rank-1 terms by unrounded tt_add; rank chain {1, d, ..., d, 1}.
TTTensor separable_tt(const SeparableFunctionSpec& spec);

/// Y^(k)(a, i, b) = 1 / (a + i + b - 1) with ranks {1, r, ..., r, 1}.
TTTensor hilbert_tt(Index d, Index n, Index r);

/// linear:   v_{t+1} = round(Y (.) v_t), v_0 = ones.
/// squaring: v_1 = round(Y (.) ones), v_{t+1} = round(v_t (.) v_t), so v_t ~ Y^(2^(t-1)).
enum class PowerScheme { linear, squaring };
PowerScheme parse_power_scheme(std::string_view name);
std::string_view power_scheme_name(PowerScheme scheme);

struct PowerIterOptions {
  Index rank = 5;
  Index max_iterations = 100;
  Algorithm algorithm = Algorithm::hatt2;
  PowerScheme scheme = PowerScheme::linear;
  std::uint64_t seed = 0;
  HpcrlVariant svd_variant = HpcrlVariant::svd();
  double tol = 1e-12;
  ResourceLimits limits{};
};

struct PowerIterResult {
  double estimate = 0.0;
  Index iterations_used = 0;
  std::vector<double> history;
  FlopLedger flops;
  double wall_time_s = 0.0;
};

/// Normalized power iteration with recompression after every product.
/// Estimate M_t = <v_t, Y (.) v_t> / <v_t, v_t>. Stops after max_iterations or
/// when |M_{t+1} - M_t| <= tol |M_t|. A zero iterate raises ConvergenceError.
PowerIterResult power_iteration_max(const TTTensor& y, const PowerIterOptions& options);

struct MaxEntry {
  double value = 0.0;
  std::vector<Index> index;  ///< 1-based, first occurrence in multi-index order
};

MaxEntry brute_force_max(const DenseTensor& x);

/// Plain-text TT container. Lines starting with '#' are comments; the header
/// documents the element order (alpha fastest, then i, then beta).
void write_tt(std::ostream& out, const TTTensor& x);
TTTensor read_tt(std::istream& in);
void save_tt(const std::string& path, const TTTensor& x);
TTTensor load_tt(const std::string& path);

}  // namespace hatt
