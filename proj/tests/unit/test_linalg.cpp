#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "hatt/errors.hpp"
#include "hatt/linalg.hpp"
#include "oracles.hpp"

using namespace hatt;

TEST(Matmul, CountsAndValues) {
  FlopLedger f;
  const Matrix b = Matrix::Random(3, 2);
  EXPECT_EQ(matmul(Matrix::Identity(3, 3), b, f), b);
  EXPECT_EQ(f.matmul_flops, 30);
  matmul(Matrix::Random(2, 3), Matrix::Random(3, 4), f);
  EXPECT_EQ(f.matmul_flops, 70);
  EXPECT_THROW(matmul(Matrix::Random(2, 3), Matrix::Random(2, 3), f), ShapeError);
  f.reset();
  EXPECT_EQ(f.total(), 0);
}

TEST(Matmul, Associativity) {
  FlopLedger f;
  const Matrix a = Matrix::Random(4, 4), b = Matrix::Random(4, 4), c = Matrix::Random(4, 4);
  const Matrix l = matmul(matmul(a, b, f), c, f), r = matmul(a, matmul(b, c, f), f);
  EXPECT_LT((l - r).norm() / l.norm(), 1e-12);
}

TEST(Matmul, LedgerSumsExactly) {
  FlopLedger f;
  std::int64_t expected = 0;
  std::mt19937 gen(5);
  for (int t = 0; t < 20; ++t) {
    const Index m = 1 + gen() % 7, n = 1 + gen() % 7, r = 1 + gen() % 7;
    matmul(Matrix::Random(m, n), Matrix::Random(n, r), f);
    expected += m * (2 * n - 1) * r;
  }
  EXPECT_EQ(f.matmul_flops, expected);
}

TEST(Qr, Examples) {
  FlopLedger f;
  const QrResult id = econ_qr(Matrix::Identity(4, 4), false, f);
  EXPECT_TRUE(id.q.isApprox(Matrix::Identity(4, 4)));
  EXPECT_TRUE(id.r.isApprox(Matrix::Identity(4, 4)));
  Matrix col(2, 1);
  col << 3, 4;
  const QrResult c = econ_qr(col, false, f);
  EXPECT_NEAR(c.q(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(c.q(1, 0), 0.8, 1e-15);
  EXPECT_NEAR(c.r(0, 0), 5.0, 1e-14);
}

TEST(Qr, RandomProperties) {
  FlopLedger f;
  const Matrix x = Matrix::Random(20, 5);
  const QrResult qr = econ_qr(x, false, f);
  EXPECT_LE((qr.q.transpose() * qr.q - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LE((qr.q * qr.r - x).norm() / x.norm(), 1e-13);
  for (Index j = 0; j < 5; ++j) EXPECT_GE(qr.r(j, j), 0.0);
  EXPECT_TRUE(qr.r.isUpperTriangular());
}

TEST(Qr, FlopCountQOnly) {
  FlopLedger f;
  econ_qr(Matrix::Random(20, 5), true, f);
  EXPECT_EQ(f.qr_flops, std::llround(4.0 * 20 * 25 - 4.0 * 125 / 3.0));
  EXPECT_EQ(qr_cost(20, 5), f.qr_flops);
}

TEST(Qr, Deterministic) {
  FlopLedger f;
  const Matrix x = Matrix::Random(9, 4);
  const QrResult a = econ_qr(x, false, f), b = econ_qr(x, false, f);
  EXPECT_EQ(a.q, b.q);
  EXPECT_EQ(a.r, b.r);
}

TEST(Qr, NonFinite) {
  FlopLedger f;
  Matrix x = Matrix::Ones(3, 2);
  x(1, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(econ_qr(x, false, f), NumericError);
  EXPECT_THROW(lq(x.transpose(), f), NumericError);
}

TEST(Lq, Examples) {
  FlopLedger f;
  const LqResult id = lq(Matrix::Identity(3, 3), f);
  EXPECT_TRUE(id.l.isApprox(Matrix::Identity(3, 3)));
  EXPECT_TRUE(id.q.isApprox(Matrix::Identity(3, 3)));
  Matrix row(1, 2);
  row << 3, 4;
  const LqResult r = lq(row, f);
  EXPECT_NEAR(r.l(0, 0), 5.0, 1e-14);
  EXPECT_NEAR(r.q(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(r.q(0, 1), 0.8, 1e-15);
  const Matrix x = Matrix::Random(4, 9);
  const LqResult g = lq(x, f);
  EXPECT_LE((g.l * g.q - x).norm() / x.norm(), 1e-13);
  EXPECT_LE((g.q * g.q.transpose() - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_TRUE(g.l.isLowerTriangular());
}

TEST(Svd, DiagonalTarget) {
  FlopLedger f;
  const Matrix x = Eigen::Vector3d(3, 2, 1).asDiagonal();
  const SvdResult s = truncated_svd(x, 2, std::nullopt, f);
  ASSERT_EQ(s.rank(), 2);
  EXPECT_NEAR(s.s(0), 3.0, 1e-14);
  EXPECT_NEAR(s.s(1), 2.0, 1e-14);
  EXPECT_NEAR(s.truncation_error, 1.0, 1e-14);
  EXPECT_EQ(f.svd_flops, kSvdFlopFactor * 3 * 9);
}

TEST(Svd, RankOneDetected) {
  FlopLedger f;
  const Vector u = Vector::Random(6), v = Vector::Random(4);
  const Matrix x = u * v.transpose();
  const SvdResult s = truncated_svd(x, std::nullopt, std::nullopt, f);
  EXPECT_EQ(s.rank(), 1);
  EXPECT_LT((s.u * s.s.asDiagonal() * s.v.transpose() - x).norm() / x.norm(), 1e-14);
}

TEST(Svd, FullReconstructionAndSigns) {
  FlopLedger f;
  const Matrix x = Matrix::Random(8, 5);
  const SvdResult s = truncated_svd(x, std::nullopt, std::nullopt, f);
  EXPECT_EQ(s.rank(), 5);
  EXPECT_LT((s.u * s.s.asDiagonal() * s.v.transpose() - x).norm() / x.norm(), 1e-12);
  for (Index j = 0; j + 1 < s.rank(); ++j) EXPECT_GE(s.s(j), s.s(j + 1));
  for (Index j = 0; j < s.rank(); ++j) {
    Index i = 0;
    while (s.u(i, j) == 0.0) ++i;
    EXPECT_GT(s.u(i, j), 0.0);
  }
}

TEST(Svd, MaxTermsAndErrors) {
  FlopLedger f;
  const Matrix x = Matrix::Random(7, 7);
  EXPECT_EQ(truncated_svd(x, std::nullopt, 3, f).rank(), 3);
  EXPECT_EQ(truncated_svd(x, 5, 2, f).rank(), 2);
  EXPECT_THROW(truncated_svd(x, 8, std::nullopt, f), ShapeError);
  Matrix bad = x;
  bad(0, 0) = NAN;
  EXPECT_THROW(truncated_svd(bad, std::nullopt, std::nullopt, f), NumericError);
}

TEST(Svd, TruncationIsOptimalAgainstOtherSubsets) {
  FlopLedger f;
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix x = Matrix::Random(6, 6);
    Eigen::JacobiSVD<Matrix> ref(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const SvdResult s = truncated_svd(x, 3, std::nullopt, f);
    const double err = (s.u * s.s.asDiagonal() * s.v.transpose() - x).norm();
    EXPECT_NEAR(err, s.truncation_error, 1e-12);
    // Any other choice of 3 retained triplets of the full basis.
    for (int mask = 0; mask < 64; ++mask) {
      if (__builtin_popcount(mask) != 3) continue;
      Matrix approx = Matrix::Zero(6, 6);
      for (int j = 0; j < 6; ++j)
        if (mask & (1 << j))
          approx += ref.singularValues()(j) * ref.matrixU().col(j) * ref.matrixV().col(j).transpose();
      EXPECT_LE(err, (approx - x).norm() + 1e-12);
    }
  }
}

TEST(Svd, RankDeficientSquareIsAccurate) {
  FlopLedger f;
  for (Index inner : {1, 3, 10}) {
    const Matrix x = Matrix::Random(81, inner) * Matrix::Random(inner, 81);
    const SvdResult s = truncated_svd(x, std::nullopt, std::nullopt, f, -1.0);
    EXPECT_LT((s.u * s.s.asDiagonal() * s.v.transpose() - x).norm() / x.norm(), 1e-13);
  }
}

TEST(KronVec, Examples) {
  const Vector v = (Vector(4) << 1, 2, 3, 4).finished();
  EXPECT_EQ(kron_apply_vec(Matrix::Identity(2, 2), Matrix::Identity(2, 2), v), v);
  const Vector r = kron_apply_vec(Matrix::Constant(1, 1, 2.0), Matrix::Constant(1, 1, 3.0),
                                  Vector::Constant(1, 5.0));
  EXPECT_EQ(r(0), 30.0);
  EXPECT_THROW(kron_apply_vec(Matrix::Random(2, 3), Matrix::Random(2, 2), Vector::Random(5)),
               ShapeError);
}

TEST(KronVec, MatchesMaterializedKronecker) {
  std::mt19937 gen(3);
  for (int trial = 0; trial < 200; ++trial) {
    const Index m = 1 + gen() % 5, n = 1 + gen() % 5, r = 1 + gen() % 5, s = 1 + gen() % 5;
    const Matrix a = Matrix::Random(m, n), b = Matrix::Random(r, s);
    const Vector v = Vector::Random(n * s);
    const Vector expected = oracle::kron(a, b) * v;
    EXPECT_LE((kron_apply_vec(a, b, v) - expected).cwiseAbs().maxCoeff(), 1e-13);
  }
}
