#include "hatt/tensor.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

#include "hatt/errors.hpp"

namespace hatt {

namespace {

void check_cap(Index count, Index cap, const char* what) {
  if (count > cap) {
    throw ResourceError(std::string(what) + " of " + std::to_string(count) +
                        " elements exceeds the cap of " + std::to_string(cap));
  }
}

Index checked_product(std::span<const Index> dims) {
  Index total = 1;
  for (Index n : dims) {
    if (__builtin_mul_overflow(total, n, &total)) {
      throw ResourceError("element count overflows 64-bit range");
    }
  }
  return total;
}

}  // namespace

Index ResourceLimits::default_dense_cap() {
  if (const char* env = std::getenv("HATT_DENSE_CAP"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long long cap = std::strtoll(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) return cap;
  }
  return 1'000'000;
}

Shape::Shape(std::vector<Index> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw ShapeError("a shape needs at least one mode");
  for (Index n : dims_) {
    if (n < 1) throw ShapeError("mode sizes must be positive");
  }
}

Index Shape::numel() const { return checked_product(dims_); }

Index multi_index(std::span<const Index> indices, const Shape& shape) {
  if (indices.size() != shape.order()) {
    throw ShapeError("index count does not match tensor order");
  }
  Index linear = 0;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] < 1 || indices[k] > shape[k]) {
      throw BoundsError("index " + std::to_string(indices[k]) + " out of range for mode " +
                        std::to_string(k + 1));
    }
    linear = linear * shape[k] + (indices[k] - 1);
  }
  return linear + 1;
}

std::vector<Index> multi_index_inv(Index linear, const Shape& shape) {
  if (linear < 1 || linear > shape.numel()) {
    throw BoundsError("linear index " + std::to_string(linear) + " out of range");
  }
  std::vector<Index> indices(shape.order());
  Index rest = linear - 1;
  for (std::size_t k = shape.order(); k-- > 0;) {
    indices[k] = rest % shape[k] + 1;
    rest /= shape[k];
  }
  return indices;
}

Vector vec_matrix(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix mat_vector(const Vector& v, Index m, Index n) {
  if (m < 1 || n < 1 || v.size() != m * n) {
    throw ShapeError("vector of length " + std::to_string(v.size()) + " cannot fold to " +
                     std::to_string(m) + "x" + std::to_string(n));
  }
  return Eigen::Map<const Matrix>(v.data(), m, n);
}

DenseTensor::DenseTensor(Shape shape, std::vector<double> values, const ResourceLimits& limits)
    : shape_(std::move(shape)), values_(std::move(values)) {
  const Index count = shape_.numel();
  check_cap(count, limits.max_dense_elements, "dense tensor");
  if (static_cast<Index>(values_.size()) != count) {
    throw ShapeError("value count does not match the shape");
  }
  for (double x : values_) {
    if (!std::isfinite(x)) throw NumericError("dense tensor values must be finite");
  }
}

DenseTensor DenseTensor::zeros(Shape shape, const ResourceLimits& limits) {
  const Index count = shape.numel();
  check_cap(count, limits.max_dense_elements, "dense tensor");
  return DenseTensor(std::move(shape), std::vector<double>(count, 0.0), limits);
}

DenseTensor DenseTensor::ones(Shape shape, const ResourceLimits& limits) {
  const Index count = shape.numel();
  check_cap(count, limits.max_dense_elements, "dense tensor");
  return DenseTensor(std::move(shape), std::vector<double>(count, 1.0), limits);
}

double DenseTensor::operator()(std::span<const Index> indices) const {
  return values_[multi_index(indices, shape_) - 1];
}

double DenseTensor::at(std::initializer_list<Index> indices) const {
  return (*this)(std::span<const Index>(indices.begin(), indices.size()));
}

double DenseTensor::frobenius_norm() const {
  return Eigen::Map<const Vector>(values_.data(), numel()).norm();
}

Matrix unfold(const DenseTensor& x, std::size_t k) {
  const std::size_t d = x.order();
  if (k < 1 || k + 1 > d) {
    throw BoundsError("split position " + std::to_string(k) + " outside 1.." +
                      std::to_string(d - 1));
  }
  const auto& dims = x.shape().dims();
  const Index rows = checked_product(std::span(dims).first(k));
  const Index cols = x.numel() / rows;
  // Multi-index order is row-major for this split.
  return Eigen::Map<const RowMajorMatrix>(x.values().data(), rows, cols);
}

DenseTensor fold(const Matrix& m, const Shape& shape, std::size_t k, const ResourceLimits& limits) {
  const std::size_t d = shape.order();
  if (k < 1 || k + 1 > d) throw BoundsError("split position out of range");
  const Index rows = checked_product(std::span(shape.dims()).first(k));
  if (m.rows() != rows || m.size() != shape.numel()) {
    throw ShapeError("matrix size does not match the target unfolding");
  }
  std::vector<double> values(static_cast<std::size_t>(m.size()));
  Eigen::Map<RowMajorMatrix>(values.data(), m.rows(), m.cols()) = m;
  return DenseTensor(shape, std::move(values), limits);
}

DenseTensor kron_dense(const DenseTensor& y, const DenseTensor& q, const ResourceLimits& limits) {
  const std::size_t d = y.order();
  if (q.order() != d) throw ShapeError("Kronecker product needs tensors of equal order");
  std::vector<Index> dims(d);
  for (std::size_t k = 0; k < d; ++k) dims[k] = y.shape()[k] * q.shape()[k];
  Shape out_shape(dims);
  check_cap(out_shape.numel(), limits.max_dense_elements, "dense tensor");

  std::vector<double> values(static_cast<std::size_t>(out_shape.numel()));
  std::vector<Index> yi(d), qi(d), oi(d);
  for (Index a = 1; a <= y.numel(); ++a) {
    yi = multi_index_inv(a, y.shape());
    const double yv = y.values()[a - 1];
    for (Index b = 1; b <= q.numel(); ++b) {
      qi = multi_index_inv(b, q.shape());
      for (std::size_t k = 0; k < d; ++k) oi[k] = (yi[k] - 1) * q.shape()[k] + qi[k];
      values[multi_index(oi, out_shape) - 1] = yv * q.values()[b - 1];
    }
  }
  return DenseTensor(std::move(out_shape), std::move(values), limits);
}

DenseTensor hadamard_dense(const DenseTensor& y, const DenseTensor& z) {
  if (!(y.shape() == z.shape())) throw ShapeError("Hadamard product needs identical shapes");
  std::vector<double> values(y.values());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] *= z.values()[i];
  ResourceLimits unlimited;
  unlimited.max_dense_elements = ResourceLimits::kUnlimited;
  return DenseTensor(y.shape(), std::move(values), unlimited);
}

DenseTensor contract_modes(const DenseTensor& a, const DenseTensor& b, std::size_t k,
                           const ResourceLimits& limits) {
  const std::size_t da = a.order();
  const std::size_t db = b.order();
  if (k < 1 || k > da || k > db) throw ShapeError("invalid number of contracted modes");
  for (std::size_t s = 0; s < k; ++s) {
    if (a.shape()[da - k + s] != b.shape()[s]) {
      throw ShapeError("contracted mode sizes do not match");
    }
  }
  std::vector<Index> dims(a.shape().dims().begin(), a.shape().dims().end() - k);
  dims.insert(dims.end(), b.shape().dims().begin() + k, b.shape().dims().end());
  if (dims.empty()) dims.push_back(1);
  Shape out_shape(dims);
  check_cap(out_shape.numel(), limits.max_dense_elements, "dense tensor");

  const Index inner = checked_product(std::span(b.shape().dims()).first(k));
  const Index rows = a.numel() / inner;
  const Index cols = b.numel() / inner;
  Eigen::Map<const RowMajorMatrix> am(a.values().data(), rows, inner);
  Eigen::Map<const RowMajorMatrix> bm(b.values().data(), inner, cols);
  std::vector<double> values(static_cast<std::size_t>(rows * cols));
  Eigen::Map<RowMajorMatrix>(values.data(), rows, cols).noalias() = am * bm;
  return DenseTensor(std::move(out_shape), std::move(values), limits);
}

}  // namespace hatt
