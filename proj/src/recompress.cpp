#include "hatt/recompress.hpp"

#include <algorithm>
#include <chrono>
#include <iostream>
#include <mutex>
#include <numeric>
#include <sstream>

#include "hatt/errors.hpp"
#include "hatt/flop_model.hpp"
#include "hatt/random.hpp"

namespace hatt {

namespace {

std::mutex warning_mutex;
WarningHandler warning_handler;

using StridedMap = Eigen::Map<Matrix, Eigen::Unaligned, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>>;
using ColumnStrideMap = Eigen::Map<Matrix, Eigen::Unaligned, Eigen::OuterStride<Eigen::Dynamic>>;

std::string chain_string(const std::vector<Index>& chain) {
  std::ostringstream out;
  for (std::size_t k = 0; k < chain.size(); ++k) out << (k ? "," : "") << chain[k];
  return out.str();
}

void validate_targets(const Shape& shape, const std::vector<Index>& targets) {
  validate_rank_chain(shape, targets);
}

void check_core_cap(Index elements, const ResourceLimits& limits, const char* what) {
  if (elements > limits.max_core_elements) {
    throw ResourceError(std::string(what) + " of " + std::to_string(elements) +
                        " elements exceeds the core cap of " +
                        std::to_string(limits.max_core_elements));
  }
}

std::vector<Index> hadamard_ranks(const TTTensor& y, const TTTensor& z) {
  const auto ry = y.ranks();
  const auto rz = z.ranks();
  std::vector<Index> out(ry.size());
  for (std::size_t k = 0; k < ry.size(); ++k) out[k] = ry[k] * rz[k];
  return out;
}

TTTensor gaussian_sketch(const Shape& shape, const std::vector<Index>& targets,
                         std::uint64_t seed) {
  return random_tt(RandomSpec{shape, targets, Distribution::gaussian, seed});
}

void require_sketch_shape(const TTTensor& a, const TTTensor& sketch) {
  if (!(a.shape() == sketch.shape())) throw ShapeError("sketch tensor shape differs from input");
}

// One orthogonalization step shared by rand_orth and hatt: returns Q and M.
std::pair<Matrix, Matrix> orthogonalize_step(const Matrix& x, const Matrix& w,
                                             FlopLedger& ledger) {
  const Matrix sketched = matmul(x, w, ledger);
  Matrix q = econ_qr(sketched, true, ledger).q;
  Matrix m = matmul(q.transpose(), x, ledger);
  return {std::move(q), std::move(m)};
}

}  // namespace

std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::tt_rounding:
      return "tt-rounding";
    case Algorithm::rand_orth:
      return "rand-orth";
    case Algorithm::hatt1:
      return "hatt-1";
    case Algorithm::hatt2:
      return "hatt-2";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::tt_rounding, Algorithm::rand_orth, Algorithm::hatt1,
                      Algorithm::hatt2}) {
    if (algorithm_name(a) == name) return a;
  }
  throw UsageError("unknown algorithm '" + std::string(name) +
                   "' (expected tt-rounding, rand-orth, hatt-1 or hatt-2)");
}

const Matrix& SketchSet::at(std::size_t k) const {
  if (k < 1 || k > w.size()) throw BoundsError("sketch index out of range");
  return w[k - 1];
}

HpcrlVariant HpcrlVariant::svd(std::optional<Index> max_terms, double rel_tol) {
  if (max_terms && *max_terms < 1) throw UsageError("max_terms must be at least 1");
  HpcrlVariant v;
  v.kind = Kind::svd;
  v.max_terms = max_terms;
  v.rel_tol = rel_tol;
  return v;
}

void set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(warning_mutex);
  warning_handler = std::move(handler);
}

void warn(const std::string& message) {
  std::lock_guard lock(warning_mutex);
  if (warning_handler) {
    warning_handler(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

std::vector<Index> clamp_targets(const Shape& shape, const std::vector<Index>& input_ranks,
                                 const std::vector<Index>& targets, bool warn_on_clamp) {
  validate_targets(shape, targets);
  validate_rank_chain(shape, input_ranks);
  const std::size_t d = shape.order();
  std::vector<Index> out(targets);
  for (std::size_t k = 1; k < d; ++k) {
    out[k] = std::min({out[k], input_ranks[k], out[k - 1] * shape[k - 1]});
  }
  for (std::size_t k = d - 1; k >= 1; --k) out[k] = std::min(out[k], shape[k] * out[k + 1]);
  if (out != targets && warn_on_clamp) {
    warn("target ranks {" + chain_string(targets) + "} clamped to {" + chain_string(out) + "}");
  }
  return out;
}

// ---------------------------------------------------------------------------
// TT-Rounding

TTTensor tt_rounding(const TTTensor& a, const std::vector<Index>& targets, FlopLedger& ledger) {
  const Shape shape = a.shape();
  validate_targets(shape, targets);
  const std::size_t d = a.order();

  std::vector<Matrix> vert(d);
  std::vector<Index> left(d);
  for (std::size_t k = 0; k < d; ++k) {
    vert[k] = a.core(k + 1).vertical();
    left[k] = a.core(k + 1).left_rank();
  }

  // Right-to-left orthogonalization: H<B^(k)> = L Q.
  for (std::size_t k = d - 1; k >= 1; --k) {
    const Index n = shape[k];
    const Index right = vert[k].cols();
    const Matrix h = Eigen::Map<const Matrix>(vert[k].data(), left[k], n * right);
    LqResult f = lq(h, ledger);
    const Index m = f.q.rows();
    vert[k] = Eigen::Map<const Matrix>(f.q.data(), m * n, right);
    vert[k - 1] = matmul(vert[k - 1], f.l, ledger);
    left[k] = m;
  }

  // Left-to-right compression: V<B^(k)> = Q R, R = U S V^T truncated.
  std::vector<TTCore> cores;
  cores.reserve(d);
  for (std::size_t k = 0; k + 1 < d; ++k) {
    QrResult qr = econ_qr(vert[k], false, ledger);
    const Index keep = std::min({targets[k + 1], qr.r.rows(), qr.r.cols()});
    SvdResult svd = truncated_svd(qr.r, keep, std::nullopt, ledger);
    Matrix core = matmul(qr.q, svd.u, ledger);
    cores.push_back(TTCore::from_vertical(std::move(core), left[k], shape[k]));

    const Matrix sv = svd.s.asDiagonal() * svd.v.transpose();
    const Index n = shape[k + 1];
    const Index right = vert[k + 1].cols();
    Eigen::Map<const Matrix> h(vert[k + 1].data(), left[k + 1], n * right);
    const Matrix next = matmul(sv, h, ledger);
    left[k + 1] = keep;
    vert[k + 1] = Eigen::Map<const Matrix>(next.data(), keep * n, right);
  }
  cores.push_back(TTCore::from_vertical(std::move(vert[d - 1]), left[d - 1], shape[d - 1]));
  return TTTensor(std::move(cores));
}

// ---------------------------------------------------------------------------
// Partial contractions

SketchSet partial_contraction_rl(const TTTensor& a, const TTTensor& r, FlopLedger& ledger) {
  require_sketch_shape(a, r);
  const std::size_t d = a.order();
  SketchSet out;
  out.w.resize(d - 1);
  if (d == 1) return out;
  out.w[d - 2] = matmul(a.core(d).horizontal(), r.core(d).horizontal().transpose(), ledger);
  for (std::size_t k = d - 1; k >= 2; --k) {
    const TTCore& ak = a.core(k);
    const TTCore& rk = r.core(k);
    // B^(k) is only ever held as a matricization.
    const Matrix b = matmul(ak.vertical(), out.w[k - 1], ledger);
    Eigen::Map<const Matrix> hb(b.data(), ak.left_rank(), ak.mode_size() * rk.right_rank());
    out.w[k - 2] = matmul(hb, rk.horizontal().transpose(), ledger);
  }
  return out;
}

SketchSet partial_contraction_rl_slices(const TTTensor& a, const TTTensor& r, FlopLedger& ledger) {
  require_sketch_shape(a, r);
  const std::size_t d = a.order();
  SketchSet out;
  out.w.resize(d - 1);
  Matrix w = Matrix::Ones(1, 1);
  for (std::size_t k = d; k >= 2; --k) {
    const TTCore& ak = a.core(k);
    const TTCore& rk = r.core(k);
    Matrix next = Matrix::Zero(ak.left_rank(), rk.left_rank());
    for (Index i = 0; i < ak.mode_size(); ++i) {
      const Matrix aw = matmul(ak.slice_view(i), w, ledger);
      next += matmul(aw, rk.slice_view(i).transpose(), ledger);
    }
    w = std::move(next);
    out.w[k - 2] = w;
  }
  return out;
}

// ---------------------------------------------------------------------------
// RandOrth

TTTensor rand_orth(const TTTensor& a, const std::vector<Index>& targets, std::uint64_t seed,
                   FlopLedger& ledger) {
  const auto clamped = clamp_targets(a.shape(), a.ranks(), targets);
  return rand_orth(a, gaussian_sketch(a.shape(), clamped, seed), ledger);
}

TTTensor rand_orth(const TTTensor& a, const TTTensor& sketch, FlopLedger& ledger) {
  require_sketch_shape(a, sketch);
  const std::size_t d = a.order();
  const Shape shape = a.shape();
  const SketchSet w = partial_contraction_rl(a, sketch, ledger);

  std::vector<TTCore> cores;
  cores.reserve(d);
  Matrix b = a.core(1).vertical();
  Index left = 1;
  for (std::size_t k = 1; k < d; ++k) {
    auto [q, m] = orthogonalize_step(b, w.at(k), ledger);
    const Index next_left = q.cols();
    cores.push_back(TTCore::from_vertical(std::move(q), left, shape[k - 1]));
    const TTCore& next = a.core(k + 1);
    const Matrix h = matmul(m, next.horizontal(), ledger);
    b = Eigen::Map<const Matrix>(h.data(), next_left * next.mode_size(), next.right_rank());
    left = next_left;
  }
  cores.push_back(TTCore::from_vertical(std::move(b), left, shape[d - 1]));
  return TTTensor(std::move(cores));
}

// ---------------------------------------------------------------------------
// Hadamard-avoiding kernels

Rank1Rep rank1_decompose(const Matrix& w, const HpcrlVariant& variant, FlopLedger& ledger) {
  Rank1Rep rep;
  if (variant.kind == HpcrlVariant::Kind::direct) {
    rep.u = w;
    rep.sigma = Vector::Ones(w.cols());
    rep.v = Matrix::Identity(w.cols(), w.cols());
    rep.terms = w.cols();
    rep.identity_weights = true;
    return rep;
  }
  SvdResult svd = truncated_svd(w, std::nullopt, variant.max_terms, ledger, variant.rel_tol);
  rep.u = std::move(svd.u);
  rep.sigma = std::move(svd.s);
  rep.v = std::move(svd.v);
  rep.terms = rep.sigma.size();
  return rep;
}

SketchSet hpcrl(const TTTensor& y, const TTTensor& z, const TTTensor& r,
                const HpcrlVariant& variant, FlopLedger& ledger, std::vector<Index>* terms_used) {
  if (!(y.shape() == z.shape())) throw ShapeError("hpcrl: Y and Z shapes differ");
  require_sketch_shape(y, r);
  const std::size_t d = y.order();
  SketchSet out;
  out.w.resize(d - 1);
  if (terms_used) terms_used->clear();

  // W^(d) = 1 turns the first step into H<Y^(d) pkp Z^(d)> H<R^(d)>^T.
  Matrix w = Matrix::Ones(1, 1);
  for (std::size_t k = d; k >= 2; --k) {
    const TTCore& yk = y.core(k);
    const TTCore& zk = z.core(k);
    const TTCore& rk = r.core(k);
    const Index n = yk.mode_size();
    const Index r0 = yk.left_rank(), r1 = yk.right_rank();
    const Index s0 = zk.left_rank(), s1 = zk.right_rank();
    const Index l0 = rk.left_rank(), l1 = rk.right_rank();
    if (w.rows() != r1 * s1 || w.cols() != l1) throw ShapeError("hpcrl: rank chains disagree");

    const Rank1Rep rep = k == d ? rank1_decompose(w, HpcrlVariant::direct(), ledger)
                                : rank1_decompose(w, variant, ledger);
    const Index terms = rep.terms;
    if (terms_used && k < d) terms_used->push_back(terms);

    // Column i + n * gamma of W_L is vec(Z(i) U_gamma Y(i)^T).
    Matrix wl(r0 * s0, n * terms);
    Eigen::Map<const Matrix> ubig(rep.u.data(), s1, r1 * terms);
    for (Index i = 0; i < n; ++i) {
      const Matrix t = matmul(zk.slice_view(i), ubig, ledger);
      const auto ys = yk.slice_view(i);
      for (Index g = 0; g < terms; ++g) {
        Eigen::Map<Matrix> dest(wl.col(i + n * g).data(), s0, r0);
        matmul_into(dest, t.middleCols(g * r1, r1), ys.transpose(), ledger);
      }
    }

    if (rep.identity_weights) {
      // W_R = H<R^(k)> in the same column order.
      w = matmul(wl, rk.horizontal().transpose(), ledger);
    } else {
      for (Index g = 0; g < terms; ++g) wl.middleCols(g * n, n) *= rep.sigma(g);
      ledger.matmul_flops += n * terms * r0 * s0;
      Matrix wr(l0, n * terms);
      for (Index i = 0; i < n; ++i) {
        ColumnStrideMap dest(wr.data() + i * l0, l0, terms, Eigen::OuterStride<>(n * l0));
        matmul_into(dest, rk.slice_view(i), rep.v, ledger);
      }
      w = matmul(wl, wr.transpose(), ledger);
    }
    out.w[k - 2] = w;
  }
  if (terms_used) std::reverse(terms_used->begin(), terms_used->end());
  return out;
}

TTCore contract_m_onto_pkp(const Matrix& m, const TTCore& y, const TTCore& z, FlopLedger& ledger,
                           const ResourceLimits& limits) {
  if (y.mode_size() != z.mode_size()) throw ShapeError("contract_m_onto_pkp: mode sizes differ");
  const Index r = y.left_rank(), r1 = y.right_rank();
  const Index s = z.left_rank(), s1 = z.right_rank();
  const Index n = y.mode_size();
  const Index l = m.rows();
  if (m.cols() != r * s) {
    throw ShapeError("contract_m_onto_pkp: M has " + std::to_string(m.cols()) +
                     " columns, expected " + std::to_string(r * s));
  }
  check_core_cap(l * n * r1 * s1, limits, "updated core");

  // Rows of M^T reshape column-wise into M_gamma (s x r), stacked side by side.
  const Matrix mt = m.transpose();
  Eigen::Map<const Matrix> mbig(mt.data(), s, r * l);
  Matrix out(l * n, r1 * s1);
  for (Index i = 0; i < n; ++i) {
    const Matrix t = matmul(z.slice_view(i).transpose(), mbig, ledger);
    const auto ys = y.slice_view(i);
    for (Index g = 0; g < l; ++g) {
      // Entry (beta', alpha') lands on row g + l i, column alpha' s' + beta'.
      StridedMap dest(out.data() + g + l * i, s1, r1,
                      Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(l * n * s1, l * n));
      matmul_into(dest, t.middleCols(g * r, r), ys, ledger);
    }
  }
  return TTCore::from_vertical(std::move(out), l, n);
}

double HattStats::mean_terms() const {
  if (terms.empty()) return 0.0;
  return double(std::accumulate(terms.begin(), terms.end(), Index{0})) / double(terms.size());
}

TTTensor hatt(const TTTensor& y, const TTTensor& z, const std::vector<Index>& targets,
              const HpcrlVariant& variant, std::uint64_t seed, FlopLedger& ledger,
              const ResourceLimits& limits, HattStats* stats) {
  if (!(y.shape() == z.shape())) throw ShapeError("hatt: Y and Z shapes differ");
  const auto clamped = clamp_targets(y.shape(), hadamard_ranks(y, z), targets);
  return hatt(y, z, gaussian_sketch(y.shape(), clamped, seed), variant, ledger, limits, stats);
}

TTTensor hatt(const TTTensor& y, const TTTensor& z, const TTTensor& sketch,
              const HpcrlVariant& variant, FlopLedger& ledger, const ResourceLimits& limits,
              HattStats* stats) {
  if (!(y.shape() == z.shape())) throw ShapeError("hatt: Y and Z shapes differ");
  require_sketch_shape(y, sketch);
  const std::size_t d = y.order();
  const Shape shape = y.shape();
  std::vector<Index> terms;
  const SketchSet w = hpcrl(y, z, sketch, variant, ledger, &terms);
  if (stats) stats->terms = terms;

  std::vector<TTCore> cores;
  cores.reserve(d);
  TTCore x = pkp_cores(y.core(1), z.core(1), limits);
  for (std::size_t k = 1; k < d; ++k) {
    auto [q, m] = orthogonalize_step(x.vertical(), w.at(k), ledger);
    check_core_cap(q.size(), limits, "orthogonal core");
    cores.push_back(TTCore::from_vertical(std::move(q), x.left_rank(), shape[k - 1]));
    x = contract_m_onto_pkp(m, y.core(k + 1), z.core(k + 1), ledger, limits);
  }
  cores.push_back(std::move(x));
  return TTTensor(std::move(cores));
}

// ---------------------------------------------------------------------------
// Dispatcher

RecompressResult recompress_hadamard(const TTTensor& y, const TTTensor& z,
                                     const std::vector<Index>& targets,
                                     const RecompressOptions& options) {
  if (!(y.shape() == z.shape())) throw ShapeError("recompress: Y and Z shapes differ");
  const Shape shape = y.shape();
  const auto clamped =
      clamp_targets(shape, hadamard_ranks(y, z), targets, options.warn_on_clamp);

  FlopLedger ledger;
  HattStats stats;
  const auto start = std::chrono::steady_clock::now();
  std::optional<TTTensor> result;
  switch (options.algorithm) {
    case Algorithm::tt_rounding:
      result = tt_rounding(tt_hadamard(y, z, options.limits), clamped, ledger);
      break;
    case Algorithm::rand_orth:
      result = rand_orth(tt_hadamard(y, z, options.limits),
                         gaussian_sketch(shape, clamped, options.seed), ledger);
      break;
    case Algorithm::hatt1:
      result = hatt(y, z, gaussian_sketch(shape, clamped, options.seed), options.svd_variant,
                    ledger, options.limits, &stats);
      break;
    case Algorithm::hatt2:
      result = hatt(y, z, gaussian_sketch(shape, clamped, options.seed), HpcrlVariant::direct(),
                    ledger, options.limits, &stats);
      break;
  }
  const auto stop = std::chrono::steady_clock::now();

  RecompressReport report;
  report.algorithm = std::string(algorithm_name(options.algorithm));
  report.seed = options.seed;
  report.output_ranks = result->ranks();
  report.wall_time_s = std::chrono::duration<double>(stop - start).count();
  report.flops_measured = ledger;
  if (y.order() >= 2) {
    FlopModelParams p;
    p.d = static_cast<Index>(y.order());
    p.n = *std::max_element(shape.dims().begin(), shape.dims().end());
    p.r = y.max_rank();
    p.s = z.max_rank();
    p.ell = *std::max_element(clamped.begin(), clamped.end());
    if (options.algorithm == Algorithm::hatt1 && !stats.terms.empty()) p.terms = stats.mean_terms();
    report.flops_predicted = flop_model(report.algorithm, p);
  }
  return RecompressResult{std::move(*result), std::move(report)};
}

}  // namespace hatt
