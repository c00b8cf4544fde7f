#include "hatt/apps.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/SVD>

#include "hatt/errors.hpp"
#include "hatt/random.hpp"

namespace hatt {

namespace {

// Moves the next mode out of the column index: C (r x n * rest) with the mode
// slowest in the column index becomes (r n) x rest with row alpha + r i.
Matrix split_next_mode(const Matrix& c, Index n) {
  const Index r = c.rows();
  const Index rest = c.cols() / n;
  Matrix out(r * n, rest);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < rest; ++j) out.block(r * i, j, r, 1) = c.col(i * rest + j);
  return out;
}

template <typename ChooseRank>
TTTensor tt_svd_sweep(const DenseTensor& x, FlopLedger& ledger, ChooseRank choose) {
  const Shape& shape = x.shape();
  const std::size_t d = shape.order();
  Matrix c = Eigen::Map<const Matrix>(x.values().data(), 1, x.numel());
  std::vector<TTCore> cores;
  cores.reserve(d);
  Index left = 1;
  for (std::size_t k = 0; k + 1 < d; ++k) {
    c = split_next_mode(c, shape[k]);
    SvdResult svd = truncated_svd(c, std::nullopt, std::nullopt, ledger, -1.0);
    const Index keep = std::max<Index>(1, std::min(choose(k, svd.s), svd.rank()));
    cores.push_back(TTCore::from_vertical(svd.u.leftCols(keep), left, shape[k]));
    c = svd.s.head(keep).asDiagonal() * svd.v.leftCols(keep).transpose();
    left = keep;
  }
  c = split_next_mode(c, shape[d - 1]);
  cores.push_back(TTCore::from_vertical(std::move(c), left, shape[d - 1]));
  return TTTensor(std::move(cores));
}

std::vector<double> draw_uniform(std::uint64_t seed, std::uint64_t stream, Index count, double lo,
                                 double hi) {
  std::mt19937_64 engine(substream_seed(seed, stream));
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> out(static_cast<std::size_t>(count));
  for (double& v : out) v = dist(engine);
  return out;
}

}  // namespace

TTTensor tt_svd(const DenseTensor& x, const std::vector<Index>& targets, FlopLedger& ledger) {
  validate_rank_chain(x.shape(), targets);
  return tt_svd_sweep(x, ledger, [&](std::size_t k, const Vector&) { return targets[k + 1]; });
}

TTTensor tt_svd(const DenseTensor& x, double rel_tol, FlopLedger& ledger) {
  if (!(rel_tol >= 0.0)) throw UsageError("tt_svd: rel_tol must be nonnegative");
  const std::size_t d = x.order();
  const double delta = d > 1 ? rel_tol / std::sqrt(double(d - 1)) * x.frobenius_norm() : 0.0;
  return tt_svd_sweep(x, ledger, [&](std::size_t, const Vector& s) {
    // Smallest rank whose dropped tail has norm <= delta.
    Index keep = s.size();
    double tail = 0.0;
    while (keep > 1) {
      const double next = tail + s(keep - 1) * s(keep - 1);
      if (std::sqrt(next) > delta) break;
      tail = next;
      --keep;
    }
    return keep;
  });
}

FourierPair fourier_tt(const FourierSpec& spec, std::uint64_t seed, FlopLedger& ledger,
                       const ResourceLimits& limits) {
  if (spec.harmonics < 1) throw UsageError("fourier_tt: at least one harmonic is needed");
  const Index count = spec.shape.numel();
  if (count > limits.max_dense_elements) {
    throw ResourceError("fourier_tt: " + std::to_string(count) +
                        " samples exceed the dense cap of " +
                        std::to_string(limits.max_dense_elements));
  }
  FourierPair out{TTTensor::ones(spec.shape), TTTensor::ones(spec.shape),
                  draw_uniform(seed, 1, spec.harmonics, spec.coef_lo, spec.coef_hi),
                  draw_uniform(seed, 2, spec.harmonics, spec.coef_lo, spec.coef_hi)};
  std::vector<double> ys(static_cast<std::size_t>(count)), zs(static_cast<std::size_t>(count));
  for (Index i = 1; i <= count; ++i) {
    const double t = 2.0 * std::numbers::pi * double(i) / double(count);
    double y = 0.0, z = 0.0;
    for (Index j = 1; j <= spec.harmonics; ++j) {
      y += out.a[j - 1] * std::sin(double(j) * t);
      z += out.b[j - 1] * std::cos(double(j) * t);
    }
    ys[i - 1] = y;
    zs[i - 1] = z;
  }
  out.y = tt_svd(DenseTensor(spec.shape, std::move(ys), limits), spec.rel_tol, ledger);
  out.z = tt_svd(DenseTensor(spec.shape, std::move(zs), limits), spec.rel_tol, ledger);
  return out;
}

SeparableFunctionSpec separable_spec(SeparableKind kind, Index d, Index n) {
  SeparableFunctionSpec spec;
  spec.kind = kind;
  spec.d = d;
  spec.n = n;
  if (kind == SeparableKind::qing) {
    spec.lo = -500.0;
    spec.hi = 500.0;
  } else {
    spec.lo = -2.5 * std::numbers::pi;
    spec.hi = 2.5 * std::numbers::pi;
  }
  return spec;
}

SeparableKind parse_separable_kind(std::string_view name) {
  if (name == "qing") return SeparableKind::qing;
  if (name == "alpine") return SeparableKind::alpine;
  throw UsageError("unknown function kind '" + std::string(name) + "' (expected qing or alpine)");
}

std::string_view separable_kind_name(SeparableKind kind) {
  return kind == SeparableKind::qing ? "qing" : "alpine";
}

double grid_point(const SeparableFunctionSpec& spec, Index j) {
  if (j < 1 || j > spec.n) throw BoundsError("grid index out of range");
  return spec.lo + double(j - 1) * (spec.hi - spec.lo) / double(spec.n - 1);
}

double separable_term(SeparableKind kind, Index i, double x) {
  if (kind == SeparableKind::qing) return (x - double(i)) * (x - double(i));
  return std::abs(x * std::sin(x) + 0.1 * x);
}

TTTensor separable_tt(const SeparableFunctionSpec& spec) {
  if (spec.d < 1) throw ShapeError("separable_tt: d must be positive");
  if (spec.n < 2) throw ShapeError("separable_tt: n must be at least 2");
  const Shape shape(std::vector<Index>(spec.d, spec.n));
  std::optional<TTTensor> sum;
  for (Index term = 1; term <= spec.d; ++term) {
    std::vector<TTCore> cores;
    for (Index k = 1; k <= spec.d; ++k) {
      std::vector<double> values(static_cast<std::size_t>(spec.n), 1.0);
      if (k == term) {
        for (Index j = 1; j <= spec.n; ++j) {
          values[j - 1] = separable_term(spec.kind, term, grid_point(spec, j));
        }
      }
      cores.emplace_back(1, spec.n, 1, std::move(values));
    }
    TTTensor t(std::move(cores));
    sum = sum ? tt_add(*sum, t) : std::move(t);
  }
  return std::move(*sum);
}

TTTensor hilbert_tt(Index d, Index n, Index r) {
  if (d < 1 || n < 1 || r < 1) throw ShapeError("hilbert_tt: d, n and r must be positive");
  std::vector<TTCore> cores;
  for (Index k = 1; k <= d; ++k) {
    const Index left = k == 1 ? 1 : r;
    const Index right = k == d ? 1 : r;
    cores.push_back(TTCore::from_function(
        left, n, right, [](Index a, Index i, Index b) { return 1.0 / double(a + i + b - 1); }));
  }
  return TTTensor(std::move(cores));
}

PowerScheme parse_power_scheme(std::string_view name) {
  if (name == "linear") return PowerScheme::linear;
  if (name == "squaring") return PowerScheme::squaring;
  throw UsageError("unknown power scheme '" + std::string(name) + "'");
}

std::string_view power_scheme_name(PowerScheme scheme) {
  return scheme == PowerScheme::linear ? "linear" : "squaring";
}

PowerIterResult power_iteration_max(const TTTensor& y, const PowerIterOptions& options) {
  if (options.rank < 1) throw UsageError("power iteration: rank must be positive");
  if (options.max_iterations < 1) throw UsageError("power iteration: max_iterations must be >= 1");
  const Shape shape = y.shape();
  const std::size_t d = shape.order();
  std::vector<Index> targets(d + 1, options.rank);
  targets.front() = targets.back() = 1;

  PowerIterResult out;
  const auto start = std::chrono::steady_clock::now();
  auto step = [&](const TTTensor& a, const TTTensor& b, Index t) {
    RecompressOptions ro;
    ro.algorithm = options.algorithm;
    ro.seed = substream_seed(options.seed, static_cast<std::uint64_t>(t));
    ro.svd_variant = options.svd_variant;
    ro.limits = options.limits;
    ro.warn_on_clamp = false;
    RecompressResult r = recompress_hadamard(a, b, targets, ro);
    out.flops += r.report.flops_measured;
    const double norm = tt_norm(r.tensor);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw ConvergenceError("power iteration: iterate vanished at step " + std::to_string(t));
    }
    return tt_scale(r.tensor, 1.0 / norm);
  };
  auto estimate = [&](const TTTensor& v) { return tt_dot3(v, y, v) / tt_dot(v, v); };

  TTTensor v = TTTensor::ones(shape);
  double previous = estimate(v);
  for (Index t = 1; t <= options.max_iterations; ++t) {
    if (options.scheme == PowerScheme::linear || t == 1) {
      v = step(y, v, t);
    } else {
      v = step(v, v, t);
    }
    const double m = estimate(v);
    out.history.push_back(m);
    out.iterations_used = t;
    out.estimate = m;
    if (std::abs(m - previous) <= options.tol * std::abs(previous)) break;
    previous = m;
  }
  out.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

MaxEntry brute_force_max(const DenseTensor& x) {
  const auto& values = x.values();
  const auto it = std::max_element(values.begin(), values.end());
  MaxEntry out;
  out.value = *it;
  out.index = multi_index_inv(static_cast<Index>(it - values.begin()) + 1, x.shape());
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

void write_tt(std::ostream& out, const TTTensor& x) {
  out << "# hatt-tt 1\n"
      << "# element order: for each core k, the r_{k-1} x n_k x r_k values with alpha fastest,"
         " then i, then beta\n";
  out << "d " << x.order() << '\n';
  out << "modes";
  const Shape shape = x.shape();
  for (Index n : shape.dims()) out << ' ' << n;
  out << '\n' << "ranks";
  for (Index r : x.ranks()) out << ' ' << r;
  out << '\n';
  out << std::setprecision(17);
  for (std::size_t k = 1; k <= x.order(); ++k) {
    out << "core " << k << '\n';
    const auto values = x.core(k).values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      out << values[i] << ((i + 1) % 8 == 0 || i + 1 == values.size() ? '\n' : ' ');
    }
  }
}

TTTensor read_tt(std::istream& in) {
  std::stringstream body;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    body << line << '\n';
  }
  auto expect = [&](const char* word) {
    std::string token;
    if (!(body >> token) || token != word) {
      throw ShapeError(std::string("TT file: expected '") + word + "'");
    }
  };
  std::size_t d = 0;
  expect("d");
  if (!(body >> d) || d < 1) throw ShapeError("TT file: bad order");
  std::vector<Index> modes(d), ranks(d + 1);
  expect("modes");
  for (auto& n : modes)
    if (!(body >> n)) throw ShapeError("TT file: bad mode sizes");
  expect("ranks");
  for (auto& r : ranks)
    if (!(body >> r)) throw ShapeError("TT file: bad rank chain");
  const Shape shape(modes);
  validate_rank_chain(shape, ranks);
  std::vector<TTCore> cores;
  for (std::size_t k = 1; k <= d; ++k) {
    expect("core");
    std::size_t index = 0;
    if (!(body >> index) || index != k) throw ShapeError("TT file: cores out of order");
    std::vector<double> values(static_cast<std::size_t>(ranks[k - 1] * modes[k - 1] * ranks[k]));
    for (double& v : values)
      if (!(body >> v)) throw ShapeError("TT file: truncated core " + std::to_string(k));
    cores.emplace_back(ranks[k - 1], modes[k - 1], ranks[k], std::move(values));
  }
  return TTTensor(std::move(cores));
}

void save_tt(const std::string& path, const TTTensor& x) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  write_tt(out, x);
}

TTTensor load_tt(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  return read_tt(in);
}

}  // namespace hatt
