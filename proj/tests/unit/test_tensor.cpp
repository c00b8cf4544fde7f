#include <gtest/gtest.h>

#include <cmath>

#include "hatt/errors.hpp"
#include "hatt/tensor.hpp"
#include "hatt/tt.hpp"
#include "oracles.hpp"

using namespace hatt;

namespace {

DenseTensor random_dense(const std::vector<Index>& dims, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  Index total = 1;
  for (Index n : dims) total *= n;
  std::vector<double> v(total);
  for (double& x : v) x = nd(gen);
  return DenseTensor(Shape(dims), v);
}

}  // namespace

TEST(MultiIndex, Examples) {
  const Shape s{3, 4};
  const std::vector<Index> a{1, 1}, b{2, 3};
  EXPECT_EQ(multi_index(a, s), 1);
  EXPECT_EQ(multi_index(b, s), 7);
}

TEST(MultiIndex, RoundTripExhaustive) {
  const Shape s{2, 3, 2};
  std::vector<Index> idx{1, 1, 1};
  Index expected = 1;
  do {
    EXPECT_EQ(multi_index(idx, s), expected);
    EXPECT_EQ(multi_index_inv(expected, s), idx);
    ++expected;
  } while (oracle::next_index(idx, s.dims()));
  EXPECT_EQ(expected, 13);
}

TEST(MultiIndex, BijectiveUpTo1e4) {
  const Shape s{10, 10, 10, 10};
  for (Index j = 1; j <= s.numel(); ++j) ASSERT_EQ(multi_index(multi_index_inv(j, s), s), j);
}

TEST(MultiIndex, OutOfRange) {
  const Shape s{3, 4};
  const std::vector<Index> bad{4, 1}, zero{0, 1};
  EXPECT_THROW(multi_index(bad, s), BoundsError);
  EXPECT_THROW(multi_index(zero, s), BoundsError);
  EXPECT_THROW(multi_index_inv(13, s), BoundsError);
}

TEST(Shape, Invariants) {
  EXPECT_THROW(Shape(std::vector<Index>{}), ShapeError);
  EXPECT_THROW(Shape({3, 0}), ShapeError);
}

TEST(Vec, ColumnStacking) {
  Matrix m(2, 2);
  m << 1, 3, 2, 4;
  const Vector v = vec_matrix(m);
  EXPECT_EQ(v, (Vector(4) << 1, 2, 3, 4).finished());
  EXPECT_EQ(mat_vector(v, 2, 2), m);
}

TEST(Vec, RoundTrip) {
  const Vector v = Vector::Random(15);
  EXPECT_EQ(vec_matrix(mat_vector(v, 3, 5)), v);
  EXPECT_THROW(mat_vector(v, 4, 4), ShapeError);
}

TEST(Unfold, ShapeAndEntries) {
  const DenseTensor x = random_dense({2, 3, 4}, 1);
  const Matrix m = unfold(x, 2);
  EXPECT_EQ(m.rows(), 6);
  EXPECT_EQ(m.cols(), 4);
  for (std::size_t k = 1; k <= 2; ++k) {
    const Matrix u = unfold(x, k);
    std::vector<Index> idx{1, 1, 1};
    do {
      const std::vector<Index> head(idx.begin(), idx.begin() + k), tail(idx.begin() + k, idx.end());
      const std::vector<Index> hd(x.shape().dims().begin(), x.shape().dims().begin() + k);
      const std::vector<Index> td(x.shape().dims().begin() + k, x.shape().dims().end());
      const Index row = multi_index(head, Shape(hd)) - 1;
      const Index col = multi_index(tail, Shape(td)) - 1;
      ASSERT_EQ(u(row, col), x(idx));
    } while (oracle::next_index(idx, x.shape().dims()));
  }
  EXPECT_THROW(unfold(x, 0), BoundsError);
  EXPECT_THROW(unfold(x, 3), BoundsError);
}

TEST(Unfold, FoldRoundTrip) {
  const DenseTensor x = random_dense({2, 2, 2}, 2);
  for (std::size_t k = 1; k <= 2; ++k) EXPECT_EQ(fold(unfold(x, k), x.shape(), k).values(), x.values());
}

TEST(Unfold, CoreMatricizations) {
  const TTCore c = oracle::random_tt({3, 4, 2}, {1, 2, 5, 1}, 3).core(2);
  const DenseTensor cd = core_as_dense(c);
  const Matrix h = unfold(cd, 1), v = unfold(cd, 2);
  EXPECT_EQ(h.rows(), 2);
  EXPECT_EQ(h.cols(), 20);
  EXPECT_EQ(v.rows(), 8);
  EXPECT_EQ(v.cols(), 5);
  for (Index a = 1; a <= 2; ++a)
    for (Index i = 1; i <= 4; ++i)
      for (Index b = 1; b <= 5; ++b) {
        EXPECT_EQ(c.horizontal()(a - 1, (i - 1) + 4 * (b - 1)), c.at(a, i, b));
        EXPECT_EQ(c.vertical()((a - 1) + 2 * (i - 1), b - 1), c.at(a, i, b));
      }
}

TEST(Products, KronAndHadamardDense) {
  const DenseTensor y = random_dense({2, 3}, 4), q = random_dense({4, 5}, 5);
  const DenseTensor k = kron_dense(y, q);
  EXPECT_EQ(k.shape(), Shape({8, 15}));
  for (Index i1 = 1; i1 <= 2; ++i1)
    for (Index j1 = 1; j1 <= 4; ++j1)
      for (Index i2 = 1; i2 <= 3; ++i2)
        for (Index j2 = 1; j2 <= 5; ++j2)
          EXPECT_DOUBLE_EQ(k.at({(i1 - 1) * 4 + j1, (i2 - 1) * 5 + j2}),
                           y.at({i1, i2}) * q.at({j1, j2}));
  EXPECT_EQ(hadamard_dense(y, DenseTensor::ones(y.shape())).values(), y.values());
  EXPECT_THROW(hadamard_dense(y, q), ShapeError);
  EXPECT_THROW(kron_dense(y, random_dense({2, 2, 2}, 6)), ShapeError);
}

TEST(Products, PkpShapeAndEntries) {
  const auto y = oracle::random_tt({3, 3, 3}, {1, 2, 4, 1}, 7).core(2);
  const auto z = oracle::random_tt({3, 3, 3}, {1, 5, 7, 1}, 8).core(2);
  const TTCore p = pkp_cores(y, z);
  EXPECT_EQ(p.left_rank(), 10);
  EXPECT_EQ(p.mode_size(), 3);
  EXPECT_EQ(p.right_rank(), 28);
  for (Index i = 1; i <= 3; ++i) {
    EXPECT_TRUE(p.slice(i).isApprox(oracle::kron(y.slice(i), z.slice(i)), 1e-15));
  }
  const TTCore small_y = oracle::random_tt({2, 2, 2}, {1, 2, 2, 1}, 9).core(2);
  const TTCore small_z = oracle::random_tt({2, 2, 2}, {1, 2, 2, 1}, 10).core(2);
  const TTCore q = pkp_cores(small_y, small_z);
  for (Index a1 = 1; a1 <= 2; ++a1)
    for (Index b1 = 1; b1 <= 2; ++b1)
      for (Index i = 1; i <= 2; ++i)
        for (Index a2 = 1; a2 <= 2; ++a2)
          for (Index b2 = 1; b2 <= 2; ++b2)
            EXPECT_DOUBLE_EQ(q.at((a1 - 1) * 2 + b1, i, (a2 - 1) * 2 + b2),
                             small_y.at(a1, i, a2) * small_z.at(b1, i, b2));
  const TTCore ones(2, 3, 2, std::vector<double>(12, 1.0));
  const TTCore po = pkp_cores(ones, ones);
  for (double v : po.values()) EXPECT_EQ(v, 1.0);
  EXPECT_THROW(pkp_cores(y, TTCore(1, 4, 1)), ShapeError);
}

TEST(Products, PkpRespectsCoreCap) {
  const TTCore y(3, 2, 3), z(3, 2, 3);
  ResourceLimits limits;
  limits.max_core_elements = 9 * 2 * 9 - 1;
  EXPECT_THROW(pkp_cores(y, z, limits), ResourceError);
  limits.max_core_elements = 9 * 2 * 9;
  EXPECT_NO_THROW(pkp_cores(y, z, limits));
}

TEST(Contraction, ShapesAndIdentity) {
  const DenseTensor a = core_as_dense(TTCore(1, 2, 3, std::vector<double>(6, 1.0)));
  const DenseTensor b = core_as_dense(TTCore(3, 2, 1, std::vector<double>(6, 1.0)));
  const DenseTensor c = contract_modes(a, b, 1);
  EXPECT_EQ(c.shape(), Shape({1, 2, 2, 1}));
  for (double v : c.values()) EXPECT_EQ(v, 3.0);

  const DenseTensor x = random_dense({2, 3, 3}, 11);
  std::vector<double> eye(9, 0.0);
  for (int i = 0; i < 3; ++i) eye[i * 3 + i] = 1.0;
  const DenseTensor id(Shape({3, 1, 3}), eye);
  const DenseTensor xi = contract_modes(x, id, 1);
  EXPECT_EQ(xi.values(), x.values());
  EXPECT_THROW(contract_modes(x, random_dense({2, 2}, 1), 1), ShapeError);
}

TEST(Contraction, PartialContractedProduct) {
  const auto x = oracle::random_tt({2, 3, 2}, {1, 2, 3, 1}, 12);
  const DenseTensor full = partial_contracted_product(x, 1, 3);
  EXPECT_EQ(full.shape(), Shape({1, 2, 3, 2, 1}));
  const auto expected = oracle::tt_values(x);
  EXPECT_LT(oracle::rel_diff(full.values(), expected), 1e-14);
  const DenseTensor mid = partial_contracted_product(x, 2, 3);
  EXPECT_EQ(mid.shape(), Shape({2, 3, 2, 1}));
}

TEST(TTTensorType, ChainInvariants) {
  std::vector<TTCore> bad_boundary{TTCore(2, 2, 1)};
  EXPECT_THROW(TTTensor{bad_boundary}, ShapeError);
  std::vector<TTCore> bad_link{TTCore(1, 2, 2), TTCore(3, 2, 1)};
  EXPECT_THROW(TTTensor{bad_link}, ShapeError);
  EXPECT_THROW(TTCore(1, 2, 2, std::vector<double>(3)), ShapeError);
  EXPECT_THROW(TTCore(1, 1, 1, std::vector<double>{NAN}), NumericError);
}

TEST(ToDense, HandExample) {
  const TTTensor x({TTCore(1, 2, 1, {1, 2}), TTCore(1, 2, 1, {3, 4})});
  const DenseTensor d = tt_to_dense(x);
  EXPECT_EQ(d.values(), (std::vector<double>{3, 4, 6, 8}));
  EXPECT_EQ(tt_to_dense(TTTensor::ones(Shape{2, 3, 2})).values(), std::vector<double>(12, 1.0));
}

TEST(ToDense, MatchesSliceProducts) {
  const auto x = oracle::random_tt({3, 2, 4}, {1, 3, 2, 1}, 13);
  EXPECT_LT(oracle::rel_diff(tt_to_dense(x).values(), oracle::tt_values(x)), 1e-14);
}

TEST(ToDense, ResourceCap) {
  ResourceLimits limits;
  limits.max_dense_elements = 100;
  EXPECT_THROW(tt_to_dense(TTTensor::ones(Shape{5, 5, 5}), limits), ResourceError);
}

TEST(Hadamard, RanksAndValues) {
  const auto y = oracle::random_tt({3, 3, 3}, {1, 2, 2, 1}, 14);
  const auto z = oracle::random_tt({3, 3, 3}, {1, 3, 3, 1}, 15);
  const TTTensor h = tt_hadamard(y, z);
  EXPECT_EQ(h.ranks(), (std::vector<Index>{1, 6, 6, 1}));
  EXPECT_LT(oracle::rel_diff(tt_to_dense(h).values(), oracle::hadamard_values(y, z)), 1e-12);
  const TTTensor hy = tt_hadamard(y, TTTensor::ones(y.shape()));
  EXPECT_EQ(hy.ranks(), y.ranks());
  EXPECT_LT(oracle::rel_diff(tt_to_dense(hy).values(), oracle::tt_values(y)), 1e-15);
  EXPECT_THROW(tt_hadamard(y, TTTensor::ones(Shape{3, 3})), ShapeError);
}

TEST(Hadamard, PropertySweep) {
  std::mt19937 gen(99);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 2 + gen() % 3;
    std::vector<Index> dims(d);
    for (auto& n : dims) n = 1 + gen() % 4;
    auto ranks = [&] {
      std::vector<Index> r(d + 1, 1);
      for (std::size_t k = 1; k < d; ++k) r[k] = 1 + gen() % 4;
      return r;
    };
    const auto y = oracle::random_tt(dims, ranks(), gen());
    const auto z = oracle::random_tt(dims, ranks(), gen());
    const TTTensor h = tt_hadamard(y, z);
    for (std::size_t k = 0; k <= d; ++k) EXPECT_EQ(h.ranks()[k], y.ranks()[k] * z.ranks()[k]);
    EXPECT_LT(relative_error(tt_to_dense(h), hadamard_dense(tt_to_dense(y), tt_to_dense(z))), 1e-12);
  }
}

TEST(Arithmetic, AddScaleDotNorm) {
  const auto y = oracle::random_tt({2, 3, 2}, {1, 2, 2, 1}, 16);
  const auto z = oracle::random_tt({2, 3, 2}, {1, 3, 3, 1}, 17);
  EXPECT_EQ(tt_add(oracle::random_tt({4, 4}, {1, 2, 1}, 1), oracle::random_tt({4, 4}, {1, 3, 1}, 2)).ranks(),
            (std::vector<Index>{1, 5, 1}));
  const auto sum = oracle::tt_values(tt_add(y, z));
  const auto vy = oracle::tt_values(y), vz = oracle::tt_values(z);
  double dot = 0.0;
  for (std::size_t i = 0; i < vy.size(); ++i) {
    EXPECT_NEAR(sum[i], vy[i] + vz[i], 1e-14);
    dot += vy[i] * vz[i];
  }
  EXPECT_NEAR(tt_dot(y, z), dot, 1e-12 * std::abs(dot));
  EXPECT_GE(tt_dot(y, y), 0.0);
  EXPECT_NEAR(tt_norm(y), oracle::norm(vy), 1e-10 * oracle::norm(vy));
  EXPECT_NEAR(tt_norm(TTTensor::ones(Shape{2, 2, 2})), std::sqrt(8.0), 1e-14);
  const auto scaled = oracle::tt_values(tt_scale(y, -2.5));
  for (std::size_t i = 0; i < vy.size(); ++i) EXPECT_NEAR(scaled[i], -2.5 * vy[i], 1e-14);
  EXPECT_THROW(tt_add(y, TTTensor::ones(Shape{2, 3})), ShapeError);
  EXPECT_THROW(tt_dot(y, TTTensor::ones(Shape{2, 3, 3})), ShapeError);
}

TEST(Arithmetic, Dot3MatchesDense) {
  const auto x = oracle::random_tt({3, 2, 3}, {1, 2, 3, 1}, 18);
  const auto y = oracle::random_tt({3, 2, 3}, {1, 3, 2, 1}, 19);
  const auto z = oracle::random_tt({3, 2, 3}, {1, 2, 2, 1}, 20);
  const auto vx = oracle::tt_values(x), yz = oracle::hadamard_values(y, z);
  double expected = 0.0;
  for (std::size_t i = 0; i < vx.size(); ++i) expected += vx[i] * yz[i];
  EXPECT_NEAR(tt_dot3(x, y, z), expected, 1e-12 * std::abs(expected));
}

TEST(Arithmetic, NormMatchesDenseOnRandomInstances) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto y = oracle::random_tt({3, 4, 3, 2}, {1, 3, 4, 2, 1}, seed);
    const double dense = tt_to_dense(y).frobenius_norm();
    EXPECT_NEAR(tt_norm(y), dense, 1e-10 * dense);
  }
}

TEST(RelativeError, Paths) {
  const auto y = oracle::random_tt({3, 3, 3}, {1, 2, 2, 1}, 21);
  const DenseTensor yd = tt_to_dense(y);
  EXPECT_NEAR(relative_error(y, y), 0.0, 1e-12);
  EXPECT_NEAR(relative_error(tt_scale(y, 2.0), yd), 1.0, 1e-14);
  for (std::uint64_t seed = 30; seed < 40; ++seed) {
    const auto a = oracle::random_tt({3, 3, 3}, {1, 2, 2, 1}, seed);
    EXPECT_NEAR(relative_error(a, y), relative_error(a, yd), 1e-10);
  }
  const TTTensor zero({TTCore(1, 3, 1), TTCore(1, 3, 1), TTCore(1, 3, 1)});
  EXPECT_THROW(relative_error(y, zero), DomainError);
  EXPECT_THROW(relative_error(y, tt_to_dense(zero)), DomainError);
}

TEST(Orthogonality, Flags) {
  const auto y = oracle::random_tt({3, 3, 3}, {1, 2, 2, 1}, 22);
  EXPECT_EQ(orthogonality(y).kind, OrthFlag::Kind::none);
  Matrix q = Matrix::Identity(3, 2);
  const TTTensor left({TTCore::from_vertical(q, 1, 3), y.core(2), y.core(3)});
  const OrthFlag f = orthogonality(left);
  EXPECT_EQ(f.kind, OrthFlag::Kind::left_orthogonal_up_to);
  EXPECT_EQ(f.core, 1u);
  EXPECT_LT(left_orthogonality_defect(left.core(1)), 1e-15);
  const TTTensor right({y.core(1), y.core(2), TTCore::from_horizontal(q.transpose(), 3, 1)});
  EXPECT_EQ(orthogonality(right).kind, OrthFlag::Kind::right_orthogonal_from);
  EXPECT_EQ(orthogonality(right).core, 3u);
  EXPECT_LT(right_orthogonality_defect(right.core(3)), 1e-15);
}
