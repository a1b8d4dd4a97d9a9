#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "freecalc/domain.hpp"
#include "test_util.hpp"

using namespace freecalc;
using namespace freecalc::testing;

namespace {

// Smallest k >= 1 with t <= 1 - 1/k and t <= k, for a polydisk point with
// delta-norm t < 1 (the norm bound is then k >= 1).
int polydisk_level_oracle(double t) {
  int k = std::max(1, static_cast<int>(std::ceil(1.0 / (1.0 - t))));
  while (k > 1 && t <= 1.0 - 1.0 / (k - 1)) --k;
  while (!(t <= 1.0 - 1.0 / k)) ++k;
  return k;
}

double max_component_norm(const MatrixTuple& x) {
  double t = 0.0;
  for (const auto& m : x.mats()) t = std::max(t, op_norm(m));
  return t;
}

}  // namespace

TEST(DeltaEval, PolydiskIsBlockDiagonal) {
  const MatrixTuple x = random_tuple(2, 3, 1.0, 4);
  const ComplexMatrix dx = delta_eval(DomainSpec::polydisk(2), x);
  ASSERT_EQ(dx.rows(), 6);
  ASSERT_EQ(dx.cols(), 6);
  EXPECT_EQ(dx.topLeftCorner(3, 3), x[0]);
  EXPECT_EQ(dx.bottomRightCorner(3, 3), x[1]);
  EXPECT_EQ(max_abs(dx.topRightCorner(3, 3)), 0.0);
  EXPECT_EQ(max_abs(dx.bottomLeftCorner(3, 3)), 0.0);
}

TEST(DeltaEval, RowBallIsHorizontalConcatenation) {
  const MatrixTuple x = random_tuple(2, 3, 1.0, 5);
  const ComplexMatrix dx = delta_eval(DomainSpec::rowball(2), x);
  ASSERT_EQ(dx.rows(), 3);
  ASSERT_EQ(dx.cols(), 6);
  EXPECT_EQ(dx.leftCols(3), x[0]);
  EXPECT_EQ(dx.rightCols(3), x[1]);
  EXPECT_EQ(max_abs(delta_eval(DomainSpec::rowball(2), MatrixTuple::zeros(2, 2))), 0.0);
}

TEST(Contains, Examples) {
  const DomainSpec pd = DomainSpec::polydisk(2);
  EXPECT_TRUE(contains(pd, random_tuple(2, 3, 0.5, 1)));
  EXPECT_TRUE(contains(pd, MatrixTuple::zeros(2, 3)));
  EXPECT_FALSE(contains(pd, MatrixTuple({ComplexMatrix::Identity(2, 2), ComplexMatrix::Zero(2, 2)})));
  EXPECT_THROW(contains(pd, random_tuple(3, 2, 0.5, 1)), ArityError);

  const DomainSpec inv = DomainSpec::invertibles();
  EXPECT_TRUE(contains(inv, MatrixTuple({random_invertible(3, 100.0, 2)})));
  EXPECT_FALSE(contains(inv, MatrixTuple({truncated_shift(3)})));
}

TEST(Contains, DirectSumMembershipIsConjunction) {
  const DomainSpec rb = DomainSpec::rowball(2);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const MatrixTuple x = random_tuple(2, 2, 0.3 + 0.02 * static_cast<double>(seed), seed);
    const MatrixTuple y = random_tuple(2, 3, 0.9 - 0.01 * static_cast<double>(seed), seed + 100);
    EXPECT_EQ(contains(rb, direct_sum({x, y})), contains(rb, x) && contains(rb, y));
  }
}

TEST(LevelIndex, Examples) {
  const DomainSpec pd1 = DomainSpec::polydisk(1);
  EXPECT_EQ(level_index(pd1, MatrixTuple::zeros(1, 3)), 1);
  EXPECT_EQ(level_index(pd1, MatrixTuple({scalar(0.5)})), 2);
  EXPECT_EQ(level_index(pd1, MatrixTuple({scalar(1.0)})), std::nullopt);
  EXPECT_EQ(level_index(pd1, MatrixTuple({scalar(0.75)})), 4);
}

TEST(LevelIndex, IsMinimal) {
  const DomainSpec rb = DomainSpec::rowball(3);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const MatrixTuple x = random_tuple(3, 2, 1.0, seed);
    const MatrixTuple scaled = x * Complex(0.99 * static_cast<double>(seed + 1) / 40.0 / op_norm(delta_eval(rb, x)));
    const auto k = level_index(rb, scaled);
    ASSERT_TRUE(k.has_value());
    EXPECT_TRUE(contains(rb, scaled));
    EXPECT_TRUE(in_level(rb, scaled, *k));
    if (*k > 1) EXPECT_FALSE(in_level(rb, scaled, *k - 1));
  }
}

TEST(LevelIndex, InvertiblesUseNormAndInverseNorm) {
  // ||2I|| = 2, ||(2I)^{-1}|| = 1/2 -> level 2.
  EXPECT_EQ(level_index(DomainSpec::invertibles(), MatrixTuple({2.0 * ComplexMatrix::Identity(2, 2)})), 2);
  // diag(1/3, 1): inverse norm 3.
  EXPECT_EQ(level_index(DomainSpec::invertibles(), MatrixTuple({diag({1.0 / 3.0, 1.0})})), 3);
}

TEST(LevelIndex, PolydiskClosedFormOnRandomPoints) {
  const DomainSpec pd = DomainSpec::polydisk(2);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> radius(0.0, 0.999);
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 4);
    const MatrixTuple x = random_tuple(2, n, radius(rng), rng());
    EXPECT_EQ(level_index(pd, x), polydisk_level_oracle(max_component_norm(x))) << "trial " << trial;
  }
}

TEST(LevelIndex, UnitaryInvariance) {
  for (const DomainSpec& spec : {DomainSpec::polydisk(2), DomainSpec::rowball(2)}) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      // Generic radius: exact ties with 1 - 1/k would make the level depend on rounding.
      std::mt19937_64 rng(seed);
      const double radius = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
      const MatrixTuple x = random_tuple(2, 3, radius, seed);
      const ComplexMatrix u = random_unitary(3, seed + 1000);
      const MatrixTuple y = x.left_mul(u.adjoint()).right_mul(u);
      EXPECT_LE(std::abs(op_norm(delta_eval(spec, x)) - op_norm(delta_eval(spec, y))), 1e-12);
      EXPECT_EQ(level_index(spec, x), level_index(spec, y));
    }
  }
}

TEST(DomainSpec, PolydiskAndRowBallMatchExplicitBDelta) {
  for (const DomainSpec& spec : {DomainSpec::polydisk(3), DomainSpec::rowball(3)}) {
    const DomainSpec explicit_spec = DomainSpec::bdelta(3, spec.delta_matrix());
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const MatrixTuple x = random_tuple(3, 2, 0.2 + 0.03 * static_cast<double>(seed), seed);
      EXPECT_EQ(delta_eval(spec, x), delta_eval(explicit_spec, x));
      EXPECT_EQ(contains(spec, x), contains(explicit_spec, x));
      EXPECT_EQ(level_index(spec, x), level_index(explicit_spec, x));
    }
  }
}

TEST(DomainSpec, BDeltaRejectsOutOfRangeVariables) {
  EXPECT_THROW(DomainSpec::bdelta(1, {{parse("x1", 2) }, {NcExpr::var(2)}}), Error);
}

TEST(Audit, ZeroSamples) {
  const AuditReport r = exhaustion_audit(DomainSpec::polydisk(2), {MatrixTuple::zeros(2, 2), MatrixTuple::zeros(2, 3)}, 1);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.common_level, 1);
}

TEST(Audit, DirectSumStaysInCommonLevel) {
  const DomainSpec pd = DomainSpec::polydisk(1);
  const AuditReport r = exhaustion_audit(pd, {MatrixTuple({scalar(0.3)}), MatrixTuple({scalar(0.5)})}, 2);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.common_level, 2);
  EXPECT_LE(op_norm(delta_eval(pd, direct_sum({MatrixTuple({scalar(0.3)}), MatrixTuple({scalar(0.5)})}))), 0.5);
}

TEST(Audit, AdversarialSequenceHasNoCommonLevel) {
  std::vector<MatrixTuple> samples;
  for (int m = 1; m <= 4; ++m) samples.push_back(MatrixTuple({(1.0 - 1.0 / m) * ComplexMatrix::Identity(2, 2)}));
  const AuditReport r = exhaustion_audit(DomainSpec::polydisk(1), samples, 3);
  EXPECT_TRUE(r.passed());
  EXPECT_FALSE(r.common_level.has_value());
  EXPECT_TRUE(r.levels_strictly_increasing);
  ASSERT_EQ(r.levels.size(), 4u);
  for (int m = 1; m <= 4; ++m) EXPECT_EQ(r.levels[static_cast<std::size_t>(m - 1)], m);
}

TEST(Audit, RandomRowBallSamplesPass) {
  std::vector<MatrixTuple> samples;
  for (std::uint64_t s = 0; s < 6; ++s) {
    const MatrixTuple x = random_tuple(2, 2, 1.0, s);
    samples.push_back(x * Complex(0.8 / op_norm(delta_eval(DomainSpec::rowball(2), x))));
  }
  EXPECT_TRUE(exhaustion_audit(DomainSpec::rowball(2), samples, 4).passed());
}
