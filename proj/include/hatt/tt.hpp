#pragma once

// Tensor-train cores and tensors.
//
// A core X^(k) has extents r_{k-1} x n_k x r_k. Values are stored column-major
// in (alpha, i, beta) order, alpha fastest. With this layout both standard
// matricizations are contiguous views:
//   vertical   V<X>  (r_{k-1} n_k) x r_k,   row alpha + r_{k-1} * i
//   horizontal H<X>  r_{k-1} x (n_k r_k),   column i + n_k * beta
// The layout only fixes which row/column a given (alpha, i, beta) occupies in
// these views; every public accessor uses 1-based (alpha, i, beta).

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "hatt/tensor.hpp"

namespace hatt {

class TTCore {
 public:
  using SliceView =
      Eigen::Map<const Matrix, Eigen::Unaligned, Eigen::OuterStride<Eigen::Dynamic>>;

  /// Zero-filled core.
  TTCore(Index left_rank, Index mode_size, Index right_rank);
  /// Core from values in (alpha, i, beta) alpha-fastest order.
  TTCore(Index left_rank, Index mode_size, Index right_rank, std::vector<double> values);

  /// Core whose vertical matricization is `v` ((left * mode) x right).
  static TTCore from_vertical(Matrix v, Index left_rank, Index mode_size);
  /// Core whose horizontal matricization is `h` (left x (mode * right)).
  static TTCore from_horizontal(const Matrix& h, Index mode_size, Index right_rank);
  /// Core with entries f(alpha, i, beta), all 1-based.
  static TTCore from_function(Index left_rank, Index mode_size, Index right_rank,
                              const std::function<double(Index, Index, Index)>& f);

  Index left_rank() const { return left_; }
  Index mode_size() const { return mode_; }
  Index right_rank() const { return right_; }
  Index numel() const { return left_ * mode_ * right_; }

  /// Entry at 1-based (alpha, i, beta).
  double at(Index alpha, Index i, Index beta) const;
  /// Copy of slice X(i), 1 <= i <= mode_size.
  Matrix slice(Index i) const;
  /// Zero-based slice view used by the kernels.
  SliceView slice_view(Index i0) const {
    return SliceView(values_.data() + left_ * i0, left_, right_,
                     Eigen::OuterStride<Eigen::Dynamic>(left_ * mode_));
  }

  Eigen::Map<const Matrix> vertical() const {
    return Eigen::Map<const Matrix>(values_.data(), left_ * mode_, right_);
  }
  Eigen::Map<const Matrix> horizontal() const {
    return Eigen::Map<const Matrix>(values_.data(), left_, mode_ * right_);
  }

  const double* data() const { return values_.data(); }
  std::vector<double> values() const;

 private:
  struct Adopt {};
  TTCore(Adopt, Index left_rank, Index mode_size, Matrix vertical);

  Index left_;
  Index mode_;
  Index right_;
  Matrix values_;  // vertical matricization
};

/// Records the largest TTCore constructed on the current thread while alive.
/// Watches nest; each sees every core built during its lifetime.
class CoreAllocationWatch {
 public:
  CoreAllocationWatch();
  ~CoreAllocationWatch();
  CoreAllocationWatch(const CoreAllocationWatch&) = delete;
  CoreAllocationWatch& operator=(const CoreAllocationWatch&) = delete;

  Index peak_elements() const { return peak_; }
  Index cores_built() const { return count_; }

 private:
  friend void note_core_allocation(Index);
  CoreAllocationWatch* parent_;
  Index peak_ = 0;
  Index count_ = 0;
};

void note_core_allocation(Index elements);

class TTTensor {
 public:
  explicit TTTensor(std::vector<TTCore> cores);

  std::size_t order() const { return cores_.size(); }
  /// Core k, 1 <= k <= d.
  const TTCore& core(std::size_t k) const;
  const std::vector<TTCore>& cores() const { return cores_; }

  Shape shape() const;
  /// Rank chain r_0 = 1, r_1, ..., r_d = 1.
  std::vector<Index> ranks() const;
  Index max_rank() const;

  /// All-ones tensor with unit ranks.
  static TTTensor ones(const Shape& shape);

 private:
  std::vector<TTCore> cores_;
};

/// Partial Kronecker product along the rank modes. Slice i is Y(i) kron Z(i);
/// rank index (alpha, beta) maps to alpha * s + beta (zero-based), Y major.
TTCore pkp_cores(const TTCore& y, const TTCore& z, const ResourceLimits& limits = ResourceLimits{});

/// A core viewed as a 3-way dense tensor of shape (r_{k-1}, n_k, r_k).
DenseTensor core_as_dense(const TTCore& core, const ResourceLimits& limits = ResourceLimits{});

/// X^(first) x^1 ... x^1 X^(last) as a dense tensor of shape (r_{first-1}, n.., r_last).
DenseTensor partial_contracted_product(const TTTensor& x, std::size_t first, std::size_t last,
                                       const ResourceLimits& limits = ResourceLimits{});

DenseTensor tt_to_dense(const TTTensor& x, const ResourceLimits& limits = ResourceLimits{});

/// Exact Hadamard product; core k is pkp_cores(Y^(k), Z^(k)) and ranks multiply.
TTTensor tt_hadamard(const TTTensor& y, const TTTensor& z,
                     const ResourceLimits& limits = ResourceLimits{});

/// Unrounded sum by block concatenation of cores; ranks add (boundary ranks stay 1).
TTTensor tt_add(const TTTensor& y, const TTTensor& z);
TTTensor tt_scale(const TTTensor& y, double c);

/// Full contraction <Y, Z>.
double tt_dot(const TTTensor& y, const TTTensor& z);
/// Sum over all indices of X(i) Y(i) Z(i), i.e. <X, Y (.) Z> without forming Y (.) Z.
double tt_dot3(const TTTensor& x, const TTTensor& y, const TTTensor& z);
/// Frobenius norm, computed from a right-to-left orthogonalization sweep.
double tt_norm(const TTTensor& y);

/// ||approx - ref||_F / ||ref||_F. The TT path forms the unrounded difference.
double relative_error(const TTTensor& approx, const TTTensor& ref);
double relative_error(const TTTensor& approx, const DenseTensor& ref);
double relative_error(const DenseTensor& approx, const DenseTensor& ref);

/// max |V<X>^T V<X> - I|.
double left_orthogonality_defect(const TTCore& core);
/// max |H<X> H<X>^T - I|.
double right_orthogonality_defect(const TTCore& core);

struct OrthFlag {
  enum class Kind { none, left_orthogonal_up_to, right_orthogonal_from };
  Kind kind = Kind::none;
  std::size_t core = 0;  ///< 1-based boundary core of the orthogonal run
};

/// Longest left-orthogonal prefix (preferred) or right-orthogonal suffix at tolerance `tol`.
OrthFlag orthogonality(const TTTensor& x, double tol = 1e-10);

}  // namespace hatt
