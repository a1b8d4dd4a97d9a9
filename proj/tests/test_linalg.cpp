#include <gtest/gtest.h>

#include "freecalc/linalg.hpp"
#include "test_util.hpp"

using namespace freecalc;
using namespace freecalc::testing;

TEST(OpNorm, BasicValues) {
  EXPECT_NEAR(op_norm(ComplexMatrix::Identity(3, 3)), 1.0, 1e-12);
  EXPECT_EQ(op_norm(ComplexMatrix::Zero(4, 4)), 0.0);
  EXPECT_NEAR(op_norm(diag({0.5, -2.0})), 2.0, 1e-12);
}

TEST(OpNorm, RejectsNonFinite) {
  ComplexMatrix m = ComplexMatrix::Identity(2, 2);
  m(0, 1) = Complex(std::nan(""), 0.0);
  EXPECT_THROW(op_norm(m), InvalidInput);
}

TEST(TupleNorm, MaxOfComponents) {
  EXPECT_EQ(tuple_norm(MatrixTuple::zeros(2, 3)), 0.0);
  const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
  EXPECT_NEAR(tuple_norm(MatrixTuple({id, ComplexMatrix(2.0 * id)})), 2.0, 1e-12);
  EXPECT_NEAR(tuple_norm(MatrixTuple({truncated_shift(2)})), 1.0, 1e-12);
}

TEST(MatrixTuple, RejectsRaggedComponents) {
  EXPECT_THROW(MatrixTuple({ComplexMatrix::Zero(2, 2), ComplexMatrix::Zero(3, 3)}), InvalidInput);
  EXPECT_THROW(MatrixTuple({ComplexMatrix::Zero(2, 3)}), InvalidInput);
  EXPECT_THROW(MatrixTuple(std::vector<ComplexMatrix>{}), InvalidInput);
}

TEST(DirectSum, SingleAndPair) {
  const MatrixTuple x = random_tuple(2, 3, 1.0, 7);
  EXPECT_EQ(dist(direct_sum({x}), x), 0.0);
  const MatrixTuple ds = direct_sum({MatrixTuple({scalar(2.0)}), MatrixTuple({scalar(3.0)})});
  EXPECT_EQ(ds[0], diag({2.0, 3.0}));
}

TEST(DirectSum, Errors) {
  EXPECT_THROW(direct_sum(std::span<const MatrixTuple>{}), InvalidInput);
  EXPECT_THROW(direct_sum({MatrixTuple::zeros(1, 2), MatrixTuple::zeros(2, 2)}), InvalidInput);
}

TEST(DirectSum, NormIsMaxAndLayoutIsAssociative) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const MatrixTuple x = random_tuple(2, 2, 0.3 + 0.1 * static_cast<double>(seed % 5), seed);
    const MatrixTuple y = random_tuple(2, 3, 0.7, seed + 100);
    const MatrixTuple z = random_tuple(2, 1, 0.2, seed + 200);
    EXPECT_NEAR(tuple_norm(direct_sum({x, y})), std::max(tuple_norm(x), tuple_norm(y)), 1e-12);
    EXPECT_EQ(dist(direct_sum({x, direct_sum({y, z})}), direct_sum({x, y, z})), 0.0);
  }
}

TEST(UpperBlock2, ZeroOffDiagonalAndScalar) {
  const MatrixTuple x = random_tuple(2, 2, 1.0, 3);
  EXPECT_EQ(dist(upper_block2(x, MatrixTuple::zeros(2, 2)), direct_sum({x, x})), 0.0);
  const MatrixTuple u = upper_block2(MatrixTuple({scalar(0.0)}), MatrixTuple({scalar(1.0)}));
  EXPECT_EQ(u[0], truncated_shift(2).transpose());
  EXPECT_THROW(upper_block2(x, MatrixTuple::zeros(2, 3)), InvalidInput);
}

TEST(Conjugate, IdentityPermutationAndUnitaryInvariance) {
  const MatrixTuple z = random_tuple(2, 4, 1.0, 11);
  EXPECT_LT(dist(conjugate(Embedding::identity(4), z), z), 1e-15);

  const MatrixTuple a = MatrixTuple({scalar(5.0)}), b = MatrixTuple({scalar(-1.0)});
  ComplexMatrix swap = ComplexMatrix::Zero(2, 2);
  swap(0, 1) = swap(1, 0) = 1.0;
  const Embedding p(swap, 1, Embedding::Kind::unitary);
  EXPECT_EQ(dist(conjugate(p, direct_sum({a, b})), direct_sum({b, a})), 0.0);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Embedding u(random_unitary(4, seed), 4, Embedding::Kind::unitary);
    EXPECT_NEAR(tuple_norm(conjugate(u, z)), tuple_norm(z), 1e-12);
  }
}

TEST(Conjugate, BlockPermutationPreservesSingularValues) {
  const MatrixTuple x = random_tuple(2, 2, 1.0, 1), y = random_tuple(2, 3, 1.0, 2);
  // Unitary moving the 2-block behind the 3-block.
  ComplexMatrix perm = ComplexMatrix::Zero(5, 5);
  for (int i = 0; i < 3; ++i) perm(2 + i, i) = 1.0;
  for (int i = 0; i < 2; ++i) perm(i, 3 + i) = 1.0;
  const MatrixTuple moved = conjugate(Embedding(perm, 5, Embedding::Kind::unitary), direct_sum({x, y}));
  const MatrixTuple swapped = direct_sum({y, x});
  for (int i = 0; i < 2; ++i)
    EXPECT_LT((singular_values(moved[i]) - singular_values(swapped[i])).norm(), 1e-12);
}

TEST(Conjugate, RejectsIllConditioned) {
  ComplexMatrix s = ComplexMatrix::Identity(2, 2);
  s(1, 1) = 1e-14;
  const Embedding e(s, 2, Embedding::Kind::invertible);
  EXPECT_THROW(conjugate(e, MatrixTuple::zeros(1, 2)), ConditioningError);
  EXPECT_THROW(Embedding(ComplexMatrix::Identity(3, 3), 2, Embedding::Kind::invertible), InvalidInput);
}

TEST(Conjugate, InvertibleMatchesExplicitFormula) {
  const ComplexMatrix s = random_invertible(3, 10.0, 5);
  const MatrixTuple z = random_tuple(2, 3, 1.0, 6);
  const MatrixTuple got = conjugate(Embedding(s, 3, Embedding::Kind::invertible), z);
  for (int i = 0; i < 2; ++i) EXPECT_LT(max_abs(got[i] - s.inverse() * z[i] * s), 1e-12);
}

TEST(RandomUnitary, UnitaryDeterministic) {
  const ComplexMatrix u1 = random_unitary(1, 9);
  EXPECT_NEAR(std::abs(u1(0, 0)), 1.0, 1e-15);
  EXPECT_EQ(random_unitary(5, 42), random_unitary(5, 42));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const ComplexMatrix u = random_unitary(8, seed);
    EXPECT_LE(op_norm(ComplexMatrix(u.adjoint() * u - ComplexMatrix::Identity(8, 8))), 1e-12);
  }
}

TEST(RandomInvertible, ConditionBoundAndDeterminism) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) EXPECT_LE(condition_number(random_invertible(2, 10.0, seed)), 10.0 * (1 + 1e-12));
  EXPECT_EQ(random_invertible(3, 5.0, 1), random_invertible(3, 5.0, 1));
  const ComplexMatrix near_unitary = random_invertible(4, 1.0 + 1e-14, 3);
  EXPECT_LE(op_norm(ComplexMatrix(near_unitary.adjoint() * near_unitary - ComplexMatrix::Identity(4, 4))), 1e-12);
  EXPECT_THROW(random_invertible(2, 1.0, 0), InvalidInput);
}

TEST(SingularValues, BoundedBelowProperty) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix m = random_gaussian(5, 4, rng());
    const Eigen::VectorXd s = singular_values(m);
    const double lo = s(s.size() - 1), hi = s(0);
    EXPECT_LE(lo, hi);
    for (int v = 0; v < 100; ++v) {
      ComplexVector x = random_gaussian(4, 1, rng());
      x.normalize();
      const double mx = (m * x).norm();
      EXPECT_GE(mx, lo - 1e-10);
      EXPECT_LE(mx, hi + 1e-10);
    }
  }
}

TEST(Vectorize, RoundTrip) {
  const MatrixTuple x = random_tuple(3, 2, 1.0, 4);
  EXPECT_EQ(dist(MatrixTuple::unvectorize(x.vectorize(), 3, 2), x), 0.0);
  // Column-major within each component.
  EXPECT_EQ(x.vectorize()(1), x[0](1, 0));
  EXPECT_EQ(x.vectorize()(2), x[0](0, 1));
}
