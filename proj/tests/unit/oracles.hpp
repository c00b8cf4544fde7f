#pragma once

// Brute-force reference computations for the unit tests. Everything here is
// written against the definitions directly and shares no code paths with the
// library kernels beyond the data types.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "hatt/random.hpp"
#include "hatt/tt.hpp"

namespace oracle {

using hatt::Index;
using hatt::Matrix;

inline hatt::TTTensor random_tt(const std::vector<Index>& dims, const std::vector<Index>& ranks,
                                std::uint64_t seed) {
  return hatt::random_tt(hatt::RandomSpec{hatt::Shape(dims), ranks,
                                          hatt::Distribution::gaussian, seed});
}

inline std::vector<Index> chain(std::size_t d, Index inner) {
  std::vector<Index> c(d + 1, inner);
  c.front() = c.back() = 1;
  return c;
}

// Odometer over 1-based multi-indices, last index fastest.
inline bool next_index(std::vector<Index>& idx, const std::vector<Index>& dims) {
  for (std::size_t k = dims.size(); k-- > 0;) {
    if (++idx[k] <= dims[k]) return true;
    idx[k] = 1;
  }
  return false;
}

// Element X(i_1..i_d) as the product of 1-based slices.
inline double tt_entry(const hatt::TTTensor& x, const std::vector<Index>& idx) {
  Matrix acc = Matrix::Ones(1, 1);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto& c = x.core(k + 1);
    Matrix s(c.left_rank(), c.right_rank());
    for (Index a = 1; a <= c.left_rank(); ++a)
      for (Index b = 1; b <= c.right_rank(); ++b) s(a - 1, b - 1) = c.at(a, idx[k], b);
    acc = acc * s;
  }
  return acc(0, 0);
}

inline std::vector<double> tt_values(const hatt::TTTensor& x) {
  const auto dims = x.shape().dims();
  std::vector<Index> idx(dims.size(), 1);
  std::vector<double> out;
  do {
    out.push_back(tt_entry(x, idx));
  } while (next_index(idx, dims));
  return out;
}

inline double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return norm(d) / norm(b);
}

inline std::vector<double> hadamard_values(const hatt::TTTensor& y, const hatt::TTTensor& z) {
  auto a = tt_values(y);
  const auto b = tt_values(z);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
  return a;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Sequential truncated SVD of a row-major value array: the error of the
// standard left-to-right unfold-and-truncate reconstruction.
inline double sequential_truncation_error(const std::vector<double>& values,
                                          const std::vector<Index>& dims,
                                          const std::vector<Index>& targets) {
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const std::size_t d = dims.size();
  Index total = 1;
  for (Index n : dims) total *= n;
  std::vector<Matrix> lefts;
  RowMajor rest = Eigen::Map<const RowMajor>(values.data(), 1, total);
  Index r = 1;
  for (std::size_t k = 0; k + 1 < d; ++k) {
    const Index cols = rest.size() / (r * dims[k]);
    RowMajor c = Eigen::Map<const RowMajor>(rest.data(), r * dims[k], cols);
    Eigen::JacobiSVD<Matrix> svd(Matrix(c), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Index keep = std::min<Index>(targets[k + 1], svd.singularValues().size());
    lefts.push_back(svd.matrixU().leftCols(keep));
    RowMajor next = svd.singularValues().head(keep).asDiagonal() *
                    svd.matrixV().leftCols(keep).transpose();
    rest = next;
    r = keep;
  }
  // Rebuild: multiply the left factors back, last index fastest.
  RowMajor acc = rest;
  for (std::size_t k = d - 1; k-- > 0;) {
    const Matrix& u = lefts[k];  // (r_{k} n_k) x r_{k+1}, row = alpha * n + i
    RowMajor prod = u * Matrix(acc);
    acc = Eigen::Map<const RowMajor>(prod.data(), u.rows() / dims[k],
                                     prod.size() / (u.rows() / dims[k]));
  }
  std::vector<double> rebuilt(acc.data(), acc.data() + acc.size());
  return rel_diff(rebuilt, values);
}

inline double left_defect(const hatt::TTCore& c) {
  const Matrix v = c.vertical();
  return (v.transpose() * v - Matrix::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff();
}

}  // namespace oracle
