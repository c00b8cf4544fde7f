#pragma once

// Dense matrix kernels with operation counting.
//
// Counting conventions:
//   matmul   (m x n)(n x r)                  m (2n - 1) r      exact
//   econ_qr  m x n, k = min(m, n)            4 m k^2 - 4 k^3 / 3 (+ 4 m k (n - k) when n > k)
//   svd      m x n, p = max, q = min         kSvdFlopFactor * p q^2   order-of-magnitude bucket
// The QR formula is the Householder cost of forming Q; it is charged whether
// or not R is used afterwards.

#include <cstdint>
#include <optional>

#include <Eigen/Core>

#include "hatt/errors.hpp"
#include "hatt/tensor.hpp"

namespace hatt {

/// Constant of the SVD bucket (thin Golub-Reinsch SVD, leading term).
inline constexpr std::int64_t kSvdFlopFactor = 14;

struct FlopLedger {
  std::int64_t matmul_flops = 0;
  std::int64_t qr_flops = 0;
  std::int64_t svd_flops = 0;

  /// Counts that follow exact formulas (matmul + qr).
  std::int64_t exact() const { return matmul_flops + qr_flops; }
  std::int64_t total() const { return exact() + svd_flops; }
  void reset() { *this = FlopLedger{}; }

  FlopLedger& operator+=(const FlopLedger& other) {
    matmul_flops += other.matmul_flops;
    qr_flops += other.qr_flops;
    svd_flops += other.svd_flops;
    return *this;
  }
};

constexpr std::int64_t matmul_cost(Index m, Index n, Index r) {
  return n == 0 ? 0 : m * (2 * n - 1) * r;
}

std::int64_t qr_cost(Index m, Index n);
std::int64_t svd_cost(Index m, Index n);

void require_finite(const Eigen::Ref<const Matrix>& x, const char* what);

/// Product of two Eigen expressions, charged to `ledger`.
template <typename A, typename B>
Matrix matmul(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b, FlopLedger& ledger) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimensions " + std::to_string(a.cols()) + " and " +
                     std::to_string(b.rows()) + " differ");
  }
  ledger.matmul_flops += matmul_cost(a.rows(), a.cols(), b.cols());
  Matrix out(a.rows(), b.cols());
  out.noalias() = a * b;
  return out;
}

/// Writes a * b into an existing block or map.
template <typename Dest, typename A, typename B>
void matmul_into(Dest&& dest, const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b,
                 FlopLedger& ledger) {
  if (a.cols() != b.rows() || dest.rows() != a.rows() || dest.cols() != b.cols()) {
    throw ShapeError("matmul_into: incompatible sizes");
  }
  ledger.matmul_flops += matmul_cost(a.rows(), a.cols(), b.cols());
  dest.noalias() = a * b;
}

struct QrResult {
  Matrix q;  ///< m x k, orthonormal columns
  Matrix r;  ///< k x n, upper triangular (trapezoidal when n > m), nonnegative diagonal
};

/// Householder economy QR. Q is m x min(m, n). Diagonal of R is made nonnegative.
QrResult econ_qr(const Matrix& x, bool q_only, FlopLedger& ledger);

struct LqResult {
  Matrix l;  ///< m x k lower triangular
  Matrix q;  ///< k x n with orthonormal rows
};

/// X = L Q, computed as the QR factorization of X^T.
LqResult lq(const Matrix& x, FlopLedger& ledger);

struct SvdResult {
  Matrix u;                      ///< m x R
  Vector s;                      ///< R singular values, nonincreasing
  Matrix v;                      ///< n x R
  double truncation_error = 0;   ///< sqrt of the sum of squared dropped singular values
  Index rank() const { return s.size(); }
};

/// Leading singular triplets of x.
///
/// Without `target_rank` the numerical rank is kept: singular values with
/// sigma_i <= rank_tol * sigma_1 are dropped (a negative rank_tol keeps all).
/// `max_terms` caps the count in either case. Columns of U are sign-normalized
/// so that their first nonzero entry is nonnegative.
SvdResult truncated_svd(const Matrix& x, std::optional<Index> target_rank,
                        std::optional<Index> max_terms, FlopLedger& ledger,
                        double rank_tol = 1e-12);

/// (A kron B) v = vec(B V A^T) with V = v folded to s x n; A kron B is never formed.
Vector kron_apply_vec(const Matrix& a, const Matrix& b, const Vector& v);

}  // namespace hatt
