#include "hatt/tt.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hatt/errors.hpp"
#include "hatt/linalg.hpp"

namespace hatt {

namespace {

thread_local CoreAllocationWatch* active_watch = nullptr;

void require_same_shape(const TTTensor& y, const TTTensor& z, const char* what) {
  if (!(y.shape() == z.shape())) throw ShapeError(std::string(what) + ": shapes differ");
}

}  // namespace

void note_core_allocation(Index elements) {
  for (CoreAllocationWatch* w = active_watch; w != nullptr; w = w->parent_) {
    w->peak_ = std::max(w->peak_, elements);
    ++w->count_;
  }
}

CoreAllocationWatch::CoreAllocationWatch() : parent_(active_watch) { active_watch = this; }

CoreAllocationWatch::~CoreAllocationWatch() { active_watch = parent_; }

// ---------------------------------------------------------------------------
// TTCore

TTCore::TTCore(Index left_rank, Index mode_size, Index right_rank)
    : left_(left_rank), mode_(mode_size), right_(right_rank) {
  if (left_ < 1 || mode_ < 1 || right_ < 1) {
    throw ShapeError("TT core extents must be positive");
  }
  note_core_allocation(numel());
  values_ = Matrix::Zero(left_ * mode_, right_);
}

TTCore::TTCore(Index left_rank, Index mode_size, Index right_rank, std::vector<double> values)
    : TTCore(left_rank, mode_size, right_rank) {
  if (static_cast<Index>(values.size()) != numel()) {
    throw ShapeError("TT core value count " + std::to_string(values.size()) +
                     " does not match extents");
  }
  values_ = Eigen::Map<const Matrix>(values.data(), left_ * mode_, right_);
  require_finite(values_, "TT core");
}

TTCore::TTCore(Adopt, Index left_rank, Index mode_size, Matrix vertical)
    : left_(left_rank), mode_(mode_size), right_(vertical.cols()), values_(std::move(vertical)) {
  if (left_ < 1 || mode_ < 1 || right_ < 1 || values_.rows() != left_ * mode_) {
    throw ShapeError("vertical matricization has the wrong size");
  }
  note_core_allocation(numel());
  require_finite(values_, "TT core");
}

TTCore TTCore::from_vertical(Matrix v, Index left_rank, Index mode_size) {
  return TTCore(Adopt{}, left_rank, mode_size, std::move(v));
}

TTCore TTCore::from_horizontal(const Matrix& h, Index mode_size, Index right_rank) {
  if (mode_size < 1 || right_rank < 1 || h.cols() != mode_size * right_rank || h.rows() < 1) {
    throw ShapeError("horizontal matricization has the wrong size");
  }
  require_finite(h, "TT core");
  TTCore core(h.rows(), mode_size, right_rank);
  Eigen::Map<Matrix>(core.values_.data(), h.rows(), h.cols()) = h;
  return core;
}

TTCore TTCore::from_function(Index left_rank, Index mode_size, Index right_rank,
                             const std::function<double(Index, Index, Index)>& f) {
  TTCore core(left_rank, mode_size, right_rank);
  double* p = core.values_.data();
  for (Index b = 0; b < right_rank; ++b)
    for (Index i = 0; i < mode_size; ++i)
      for (Index a = 0; a < left_rank; ++a) *p++ = f(a + 1, i + 1, b + 1);
  require_finite(core.values_, "TT core");
  return core;
}

double TTCore::at(Index alpha, Index i, Index beta) const {
  if (alpha < 1 || alpha > left_ || i < 1 || i > mode_ || beta < 1 || beta > right_) {
    throw BoundsError("TT core index out of range");
  }
  return values_(alpha - 1 + left_ * (i - 1), beta - 1);
}

Matrix TTCore::slice(Index i) const {
  if (i < 1 || i > mode_) throw BoundsError("slice index out of range");
  return slice_view(i - 1);
}

std::vector<double> TTCore::values() const {
  return std::vector<double>(values_.data(), values_.data() + values_.size());
}

// ---------------------------------------------------------------------------
// TTTensor

TTTensor::TTTensor(std::vector<TTCore> cores) : cores_(std::move(cores)) {
  if (cores_.empty()) throw ShapeError("a TT tensor needs at least one core");
  if (cores_.front().left_rank() != 1) throw ShapeError("first core must have left rank 1");
  if (cores_.back().right_rank() != 1) throw ShapeError("last core must have right rank 1");
  for (std::size_t k = 0; k + 1 < cores_.size(); ++k) {
    if (cores_[k].right_rank() != cores_[k + 1].left_rank()) {
      throw ShapeError("rank mismatch between cores " + std::to_string(k + 1) + " and " +
                       std::to_string(k + 2));
    }
  }
}

const TTCore& TTTensor::core(std::size_t k) const {
  if (k < 1 || k > cores_.size()) throw BoundsError("core index out of range");
  return cores_[k - 1];
}

Shape TTTensor::shape() const {
  std::vector<Index> dims;
  dims.reserve(cores_.size());
  for (const auto& c : cores_) dims.push_back(c.mode_size());
  return Shape(std::move(dims));
}

std::vector<Index> TTTensor::ranks() const {
  std::vector<Index> r{1};
  for (const auto& c : cores_) r.push_back(c.right_rank());
  return r;
}

Index TTTensor::max_rank() const {
  const auto r = ranks();
  return *std::max_element(r.begin(), r.end());
}

TTTensor TTTensor::ones(const Shape& shape) {
  std::vector<TTCore> cores;
  for (Index n : shape.dims()) cores.emplace_back(1, n, 1, std::vector<double>(n, 1.0));
  return TTTensor(std::move(cores));
}

// ---------------------------------------------------------------------------
// Products and contractions

TTCore pkp_cores(const TTCore& y, const TTCore& z, const ResourceLimits& limits) {
  if (y.mode_size() != z.mode_size()) throw ShapeError("pkp_cores: mode sizes differ");
  const Index r1 = y.left_rank(), r2 = y.right_rank();
  const Index s1 = z.left_rank(), s2 = z.right_rank();
  const Index n = y.mode_size();
  const Index count = r1 * s1 * n * r2 * s2;
  if (count > limits.max_core_elements) {
    throw ResourceError("partial Kronecker core of " + std::to_string(count) +
                        " elements exceeds the core cap of " +
                        std::to_string(limits.max_core_elements));
  }
  Matrix v(r1 * s1 * n, r2 * s2);
  const Index left = r1 * s1;
  for (Index i = 0; i < n; ++i) {
    const auto ys = y.slice_view(i);
    const auto zs = z.slice_view(i);
    for (Index a2 = 0; a2 < r2; ++a2)
      for (Index b2 = 0; b2 < s2; ++b2)
        for (Index a1 = 0; a1 < r1; ++a1)
          for (Index b1 = 0; b1 < s1; ++b1)
            v(a1 * s1 + b1 + left * i, a2 * s2 + b2) = ys(a1, a2) * zs(b1, b2);
  }
  return TTCore::from_vertical(std::move(v), left, n);
}

DenseTensor core_as_dense(const TTCore& core, const ResourceLimits& limits) {
  Shape shape{core.left_rank(), core.mode_size(), core.right_rank()};
  std::vector<double> values(static_cast<std::size_t>(core.numel()));
  std::size_t p = 0;
  for (Index a = 1; a <= core.left_rank(); ++a)
    for (Index i = 1; i <= core.mode_size(); ++i)
      for (Index b = 1; b <= core.right_rank(); ++b) values[p++] = core.at(a, i, b);
  return DenseTensor(std::move(shape), std::move(values), limits);
}

DenseTensor partial_contracted_product(const TTTensor& x, std::size_t first, std::size_t last,
                                       const ResourceLimits& limits) {
  if (first < 1 || last > x.order() || first > last) {
    throw BoundsError("partial_contracted_product: core range out of bounds");
  }
  DenseTensor acc = core_as_dense(x.core(first), limits);
  for (std::size_t k = first + 1; k <= last; ++k) {
    acc = contract_modes(acc, core_as_dense(x.core(k), limits), 1, limits);
  }
  return acc;
}

DenseTensor tt_to_dense(const TTTensor& x, const ResourceLimits& limits) {
  const Shape shape = x.shape();
  const Index total = shape.numel();
  if (total > limits.max_dense_elements) {
    throw ResourceError("dense reconstruction of " + std::to_string(total) +
                        " elements exceeds the cap of " + std::to_string(limits.max_dense_elements));
  }
  // Rows of `acc` follow the multi-index of the modes processed so far.
  Matrix acc = Matrix::Ones(1, 1);
  for (const TTCore& core : x.cores()) {
    const Index n = core.mode_size();
    Matrix next(acc.rows() * n, core.right_rank());
    for (Index i = 0; i < n; ++i) {
      const Matrix part = acc * core.slice_view(i);
      for (Index p = 0; p < acc.rows(); ++p) next.row(p * n + i) = part.row(p);
    }
    acc = std::move(next);
  }
  return DenseTensor(shape, std::vector<double>(acc.data(), acc.data() + acc.size()), limits);
}

TTTensor tt_hadamard(const TTTensor& y, const TTTensor& z, const ResourceLimits& limits) {
  require_same_shape(y, z, "tt_hadamard");
  std::vector<TTCore> cores;
  cores.reserve(y.order());
  for (std::size_t k = 1; k <= y.order(); ++k) cores.push_back(pkp_cores(y.core(k), z.core(k), limits));
  return TTTensor(std::move(cores));
}

TTTensor tt_add(const TTTensor& y, const TTTensor& z) {
  require_same_shape(y, z, "tt_add");
  const std::size_t d = y.order();
  std::vector<TTCore> cores;
  cores.reserve(d);
  for (std::size_t k = 1; k <= d; ++k) {
    const TTCore& a = y.core(k);
    const TTCore& b = z.core(k);
    const Index n = a.mode_size();
    const bool first = k == 1;
    const bool last = k == d;
    const Index left = first ? 1 : a.left_rank() + b.left_rank();
    const Index right = last ? 1 : a.right_rank() + b.right_rank();
    // Offsets of b's block inside the concatenated core.
    const Index bl = first ? 0 : a.left_rank();
    const Index br = last ? 0 : a.right_rank();
    Matrix v = Matrix::Zero(left * n, right);
    for (Index i = 0; i < n; ++i) {
      const auto as = a.slice_view(i);
      const auto bs = b.slice_view(i);
      for (Index c = 0; c < a.right_rank(); ++c)
        for (Index r = 0; r < a.left_rank(); ++r) v(r + left * i, c) += as(r, c);
      for (Index c = 0; c < b.right_rank(); ++c)
        for (Index r = 0; r < b.left_rank(); ++r) v(bl + r + left * i, br + c) += bs(r, c);
    }
    cores.push_back(TTCore::from_vertical(std::move(v), left, n));
  }
  return TTTensor(std::move(cores));
}

TTTensor tt_scale(const TTTensor& y, double c) {
  std::vector<TTCore> cores = y.cores();
  const TTCore& first = cores.front();
  cores.front() = TTCore::from_vertical(Matrix(first.vertical() * c), 1, first.mode_size());
  return TTTensor(std::move(cores));
}

double tt_dot(const TTTensor& y, const TTTensor& z) {
  require_same_shape(y, z, "tt_dot");
  Matrix g = Matrix::Ones(1, 1);
  for (std::size_t k = 1; k <= y.order(); ++k) {
    const TTCore& a = y.core(k);
    const TTCore& b = z.core(k);
    Matrix next = Matrix::Zero(a.right_rank(), b.right_rank());
    for (Index i = 0; i < a.mode_size(); ++i) {
      next.noalias() += a.slice_view(i).transpose() * (g * b.slice_view(i));
    }
    g = std::move(next);
  }
  return g(0, 0);
}

double tt_dot3(const TTTensor& x, const TTTensor& y, const TTTensor& z) {
  require_same_shape(x, y, "tt_dot3");
  require_same_shape(x, z, "tt_dot3");
  // g holds the running contraction as an (rx) x (ry * rz) matrix, ry fastest.
  Matrix g = Matrix::Ones(1, 1);
  for (std::size_t k = 1; k <= x.order(); ++k) {
    const TTCore& a = x.core(k);
    const TTCore& b = y.core(k);
    const TTCore& c = z.core(k);
    const Index rb = b.left_rank(), rc = c.left_rank();
    const Index ra2 = a.right_rank(), rb2 = b.right_rank(), rc2 = c.right_rank();
    Matrix next = Matrix::Zero(ra2, rb2 * rc2);
    for (Index i = 0; i < a.mode_size(); ++i) {
      // contract alpha: (ra2) x (rb * rc)
      const Matrix t1 = a.slice_view(i).transpose() * g;
      // contract gamma: view t1 as (ra2 * rb) x rc
      const Matrix t2 = Eigen::Map<const Matrix>(t1.data(), ra2 * rb, rc) * c.slice_view(i);
      // contract beta for each gamma'
      const Matrix ys = b.slice_view(i);
      for (Index cc = 0; cc < rc2; ++cc) {
        Eigen::Map<const Matrix> block(t2.data() + cc * ra2 * rb, ra2, rb);
        next.middleCols(cc * rb2, rb2).noalias() += block * ys;
      }
    }
    g = std::move(next);
  }
  return g(0, 0);
}

double tt_norm(const TTTensor& y) {
  FlopLedger scratch;
  // Right-to-left LQ sweep; the carried factor ends up holding the whole norm.
  Matrix carry = Matrix::Ones(1, 1);
  for (std::size_t k = y.order(); k >= 1; --k) {
    const TTCore& core = y.core(k);
    const Matrix v = core.vertical() * carry;  // (r_{k-1} n) x m
    if (k == 1) return v.norm();
    const Index m = v.cols();
    const Matrix h = Eigen::Map<const Matrix>(v.data(), core.left_rank(), core.mode_size() * m);
    carry = lq(h, scratch).l;
  }
  return 0.0;
}

double relative_error(const TTTensor& approx, const TTTensor& ref) {
  const double denom = tt_norm(ref);
  if (denom == 0.0) throw DomainError("relative_error: reference has zero norm");
  return tt_norm(tt_add(approx, tt_scale(ref, -1.0))) / denom;
}

double relative_error(const TTTensor& approx, const DenseTensor& ref) {
  ResourceLimits limits;
  limits.max_dense_elements = std::max(limits.max_dense_elements, ref.numel());
  return relative_error(tt_to_dense(approx, limits), ref);
}

double relative_error(const DenseTensor& approx, const DenseTensor& ref) {
  if (!(approx.shape() == ref.shape())) throw ShapeError("relative_error: shapes differ");
  const double denom = ref.frobenius_norm();
  if (denom == 0.0) throw DomainError("relative_error: reference has zero norm");
  double acc = 0.0;
  for (std::size_t i = 0; i < ref.values().size(); ++i) {
    const double diff = approx.values()[i] - ref.values()[i];
    acc += diff * diff;
  }
  return std::sqrt(acc) / denom;
}

double left_orthogonality_defect(const TTCore& core) {
  const auto v = core.vertical();
  const Matrix gram = v.transpose() * v;
  return (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

double right_orthogonality_defect(const TTCore& core) {
  const auto h = core.horizontal();
  const Matrix gram = h * h.transpose();
  return (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

OrthFlag orthogonality(const TTTensor& x, double tol) {
  const std::size_t d = x.order();
  std::size_t left = 0;
  while (left < d && left_orthogonality_defect(x.core(left + 1)) <= tol) ++left;
  if (left > 0) return {OrthFlag::Kind::left_orthogonal_up_to, left};
  std::size_t right = d + 1;
  while (right > 1 && right_orthogonality_defect(x.core(right - 1)) <= tol) --right;
  if (right <= d) return {OrthFlag::Kind::right_orthogonal_from, right};
  return {};
}

}  // namespace hatt
