#include "hatt/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>

#include <lapacke.h>

#include "hatt/errors.hpp"

namespace hatt {

std::int64_t qr_cost(Index m, Index n) {
  const Index k = std::min(m, n);
  const double cost = 4.0 * double(m) * double(k) * double(k) - 4.0 * std::pow(double(k), 3) / 3.0 +
                      4.0 * double(m) * double(k) * double(n - k);
  return static_cast<std::int64_t>(std::llround(cost));
}

std::int64_t svd_cost(Index m, Index n) {
  const Index p = std::max(m, n);
  const Index q = std::min(m, n);
  return kSvdFlopFactor * p * q * q;
}

void require_finite(const Eigen::Ref<const Matrix>& x, const char* what) {
  if (!x.allFinite()) throw NumericError(std::string(what) + ": input has non-finite entries");
}

QrResult econ_qr(const Matrix& x, bool q_only, FlopLedger& ledger) {
  require_finite(x, "econ_qr");
  const Index m = x.rows();
  const Index n = x.cols();
  const Index k = std::min(m, n);
  ledger.qr_flops += qr_cost(m, n);

  QrResult out;
  if (k == 0) {
    out.q = Matrix::Zero(m, 0);
    out.r = Matrix::Zero(0, n);
    return out;
  }
  Eigen::HouseholderQR<Matrix> qr(x);
  out.q = qr.householderQ() * Matrix::Identity(m, k);
  out.r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  for (Index j = 0; j < k; ++j) {
    if (out.r(j, j) < 0.0) {
      out.r.row(j) *= -1.0;
      out.q.col(j) *= -1.0;
    }
  }
  if (q_only) out.r.resize(0, 0);
  return out;
}

LqResult lq(const Matrix& x, FlopLedger& ledger) {
  QrResult qr = econ_qr(x.transpose(), false, ledger);
  return LqResult{qr.r.transpose(), qr.q.transpose()};
}

SvdResult truncated_svd(const Matrix& x, std::optional<Index> target_rank,
                        std::optional<Index> max_terms, FlopLedger& ledger, double rank_tol) {
  require_finite(x, "truncated_svd");
  const Index full = std::min(x.rows(), x.cols());
  if (target_rank && (*target_rank < 0 || *target_rank > full)) {
    throw ShapeError("truncated_svd: target rank " + std::to_string(*target_rank) +
                     " exceeds min(m, n) = " + std::to_string(full));
  }
  if (max_terms && *max_terms < 1) throw ShapeError("truncated_svd: max_terms must be >= 1");
  ledger.svd_flops += svd_cost(x.rows(), x.cols());

  SvdResult out;
  if (full == 0) {
    out.u = Matrix::Zero(x.rows(), 0);
    out.s = Vector::Zero(0);
    out.v = Matrix::Zero(x.cols(), 0);
    return out;
  }
  // LAPACK QR-iteration SVD; Eigen's BDCSVD loses accuracy on strongly
  // rank-deficient inputs such as the cores of explicit Hadamard products.
  Matrix a = x;
  Matrix u(x.rows(), full);
  Matrix vt(full, x.cols());
  Vector sigma(full);
  Vector superb(full);
  const lapack_int info = LAPACKE_dgesvd(
      LAPACK_COL_MAJOR, 'S', 'S', static_cast<lapack_int>(x.rows()),
      static_cast<lapack_int>(x.cols()), a.data(), static_cast<lapack_int>(x.rows()), sigma.data(),
      u.data(), static_cast<lapack_int>(x.rows()), vt.data(), static_cast<lapack_int>(full),
      superb.data());
  if (info != 0) throw NumericError("truncated_svd: dgesvd failed with info " + std::to_string(info));

  Index keep = 0;
  if (target_rank) {
    keep = *target_rank;
  } else if (rank_tol < 0.0) {
    keep = full;
  } else {
    const double cutoff = rank_tol * sigma(0);
    while (keep < full && sigma(keep) > cutoff) ++keep;
  }
  if (max_terms) keep = std::min(keep, *max_terms);

  out.u = u.leftCols(keep);
  out.s = sigma.head(keep);
  out.v = vt.topRows(keep).transpose();
  out.truncation_error = sigma.tail(full - keep).norm();
  for (Index j = 0; j < keep; ++j) {
    for (Index i = 0; i < out.u.rows(); ++i) {
      const double value = out.u(i, j);
      if (value != 0.0) {
        if (value < 0.0) {
          out.u.col(j) *= -1.0;
          out.v.col(j) *= -1.0;
        }
        break;
      }
    }
  }
  return out;
}

Vector kron_apply_vec(const Matrix& a, const Matrix& b, const Vector& v) {
  const Index n = a.cols();
  const Index s = b.cols();
  if (v.size() != n * s) {
    throw ShapeError("kron_apply_vec: vector length " + std::to_string(v.size()) +
                     " differs from " + std::to_string(n * s));
  }
  Eigen::Map<const Matrix> folded(v.data(), s, n);
  const Matrix product = b * folded * a.transpose();
  return Eigen::Map<const Vector>(product.data(), product.size());
}

}  // namespace hatt
