#pragma once

// Dense tensors, index conventions and the elementary tensor products.
//
// Two index conventions coexist in this library:
//   * tensor multi-indices are 1-based with the LAST index varying fastest,
//     i.e. multi_index(i_1..i_d) = i_d + (i_{d-1}-1) n_d + ... ;
//   * matrix vectorization is column-major (vec stacks columns).
// DenseTensor stores its values in multi-index order.

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace hatt {

using Index = std::int64_t;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Element-count caps for dense oracles and explicit TT cores.
struct ResourceLimits {
  static constexpr Index kUnlimited = INT64_MAX;

  /// Largest DenseTensor that may be materialized.
  Index max_dense_elements = default_dense_cap();
  /// Largest TT core that explicit-product kernels (pkp_cores, tt_hadamard) may build.
  Index max_core_elements = kUnlimited;

  /// 10^6 unless overridden through the HATT_DENSE_CAP environment variable.
  static Index default_dense_cap();
};

class Shape {
 public:
  Shape() = default;
  explicit Shape(std::vector<Index> dims);
  Shape(std::initializer_list<Index> dims) : Shape(std::vector<Index>(dims)) {}

  std::size_t order() const { return dims_.size(); }
  /// Mode size n_{k+1} (zero-based position k).
  Index operator[](std::size_t k) const { return dims_[k]; }
  const std::vector<Index>& dims() const { return dims_; }
  /// Product of all mode sizes; throws ResourceError on int64 overflow.
  Index numel() const;

  friend bool operator==(const Shape&, const Shape&) = default;

 private:
  std::vector<Index> dims_;
};

/// 1-based multi-index of (i_1..i_d) in `shape`, last index fastest.
Index multi_index(std::span<const Index> indices, const Shape& shape);
/// Inverse of multi_index.
std::vector<Index> multi_index_inv(Index linear, const Shape& shape);

/// Column-stacking vectorization.
Vector vec_matrix(const Matrix& m);
/// Inverse of vec_matrix: folds v column-wise into an m x n matrix.
Matrix mat_vector(const Vector& v, Index m, Index n);

class DenseTensor {
 public:
  DenseTensor(Shape shape, std::vector<double> values,
              const ResourceLimits& limits = ResourceLimits{});

  static DenseTensor zeros(Shape shape, const ResourceLimits& limits = ResourceLimits{});
  static DenseTensor ones(Shape shape, const ResourceLimits& limits = ResourceLimits{});

  const Shape& shape() const { return shape_; }
  std::size_t order() const { return shape_.order(); }
  Index numel() const { return static_cast<Index>(values_.size()); }

  /// Element at 1-based indices.
  double operator()(std::span<const Index> indices) const;
  double at(std::initializer_list<Index> indices) const;

  /// Values in multi-index order.
  const std::vector<double>& values() const { return values_; }

  double frobenius_norm() const;

 private:
  Shape shape_;
  std::vector<double> values_;
};

/// Mode-(1..k) matricization: (n_1..n_k) x (n_{k+1}..n_d), 1 <= k <= d-1.
Matrix unfold(const DenseTensor& x, std::size_t k);
/// Inverse of unfold for a given target shape.
DenseTensor fold(const Matrix& m, const Shape& shape, std::size_t k,
                 const ResourceLimits& limits = ResourceLimits{});

/// Tensor Kronecker product; result mode k has size n_k m_k, index (i_k, j_k) with j_k fastest.
DenseTensor kron_dense(const DenseTensor& y, const DenseTensor& q,
                       const ResourceLimits& limits = ResourceLimits{});
DenseTensor hadamard_dense(const DenseTensor& y, const DenseTensor& z);

/// Contraction of the trailing k modes of `a` with the leading k modes of `b`.
DenseTensor contract_modes(const DenseTensor& a, const DenseTensor& b, std::size_t k,
                           const ResourceLimits& limits = ResourceLimits{});

}  // namespace hatt
