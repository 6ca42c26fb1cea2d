#include <gtest/gtest.h>

#include "test_support.hpp"

namespace robust_mc {
namespace {

using namespace robust_mc::testing;

TEST(SgnPolar, Examples) {
  DenseMatrix d(2, 2);
  d << 2, 0, 0, 3;
  EXPECT_LE((sgn_polar(d) - DenseMatrix::Identity(2, 2)).norm(), 1e-14);
  d << -4, 0, 0, 1;
  DenseMatrix want(2, 2);
  want << -1, 0, 0, 1;
  EXPECT_LE((sgn_polar(d) - want).norm(), 1e-14);
  EXPECT_THROW(sgn_polar(DenseMatrix::Zero(2, 3)), ShapeError);
}

TEST(SgnPolar, OrthonormalOutput) {
  RngStream rng(30, 0);
  for (int t = 0; t < 20; ++t) {
    const DenseMatrix q = sgn_polar(random_matrix(4, 4, rng));
    EXPECT_LE((q.transpose() * q - DenseMatrix::Identity(4, 4)).norm(), 1e-12);
  }
}

TEST(Align, IdentityAndRotation) {
  RngStream rng(31, 0);
  const FactorPair t(random_matrix(10, 3, rng), random_matrix(10, 3, rng));
  const AlignedError same = align(t, t);
  EXPECT_LE(same.frob_err, 1e-12);
  EXPECT_LE((same.rotation - DenseMatrix::Identity(3, 3)).norm(), 1e-12);

  const DenseMatrix q = random_orthonormal(3, 3, rng);
  const AlignedError rot = align(t.rotated(q), t);
  EXPECT_LE(rot.frob_err, 1e-12);
  EXPECT_LE((rot.rotation - q.transpose()).norm(), 1e-10);
}

TEST(Align, NoWorseThanRandomRotations) {
  RngStream rng(32, 0);
  for (int t = 0; t < 20; ++t) {
    const FactorPair f(random_matrix(8, 3, rng), random_matrix(8, 3, rng));
    const FactorPair g(random_matrix(8, 3, rng), random_matrix(8, 3, rng));
    const double best = align(f, g).frob_err;
    for (int k = 0; k < 20; ++k) {
      const DenseMatrix q = random_orthonormal(3, 3, rng);
      EXPECT_LE(best, (f.stacked() * q - g.stacked()).norm() + 1e-10);
    }
  }
}

TEST(Align, RankOneIsBestSign) {
  RngStream rng(33, 0);
  for (int t = 0; t < 50; ++t) {
    const FactorPair f(random_matrix(6, 1, rng), random_matrix(6, 1, rng));
    const FactorPair g(random_matrix(6, 1, rng), random_matrix(6, 1, rng));
    const double plus = (f.stacked() - g.stacked()).norm();
    const double minus = (-f.stacked() - g.stacked()).norm();
    EXPECT_EQ(align(f, g).frob_err, std::min(plus, minus));
  }
}

TEST(Align, ErrorNormsConsistent) {
  RngStream rng(34, 0);
  const FactorPair f(random_matrix(7, 2, rng), random_matrix(7, 2, rng));
  const FactorPair g(random_matrix(7, 2, rng), random_matrix(7, 2, rng));
  const AlignedError e = align(f, g);
  EXPECT_LE(e.spectral_err, e.frob_err * (1 + 1e-12));
  EXPECT_LE(e.two_inf_err, e.spectral_err * (1 + 1e-12));
}

TEST(Align, Idempotent) {
  RngStream rng(35, 0);
  const FactorPair f(random_matrix(9, 3, rng), random_matrix(9, 3, rng));
  const FactorPair g(random_matrix(9, 3, rng), random_matrix(9, 3, rng));
  const AlignedError once = align(f, g);
  const AlignedError twice = align(f.rotated(once.rotation), g);
  EXPECT_LE((twice.rotation - DenseMatrix::Identity(3, 3)).norm(), 1e-10);
  EXPECT_NEAR(twice.frob_err, once.frob_err, 1e-12);
}

TEST(Incoherence, Examples) {
  EXPECT_NEAR(incoherence_mu(DenseMatrix::Identity(4, 4).leftCols(1)), 4.0, 1e-15);
  const DenseMatrix flat = DenseMatrix::Constant(4, 1, 0.5);
  EXPECT_NEAR(incoherence_mu(flat), 1.0, 1e-15);
  EXPECT_THROW(incoherence_mu(DenseMatrix::Constant(4, 1, 1.0)), DomainError);
}

TEST(Incoherence, Bounds) {
  RngStream rng(36, 0);
  for (int t = 0; t < 10; ++t) {
    const double mu = incoherence_mu(random_orthonormal(40, 3, rng));
    EXPECT_GE(mu, 1.0 - 1e-12);
    EXPECT_LE(mu, 40.0 / 3.0 + 1e-12);
  }
}

TEST(Imbalance, Values) {
  RngStream rng(37, 0);
  const DenseMatrix x = random_matrix(5, 2, rng);
  EXPECT_EQ(imbalance(FactorPair(x, x)), 0.0);
  EXPECT_NEAR(imbalance(FactorPair(x, DenseMatrix::Zero(5, 2))), (x.transpose() * x).norm(), 1e-12);
}

TEST(RelativeError, Basics) {
  DenseMatrix t = DenseMatrix::Identity(2, 2), e = DenseMatrix::Zero(2, 2);
  EXPECT_DOUBLE_EQ(relative_error(e, t), 1.0);
  EXPECT_THROW(relative_error(t, e), DomainError);
  EXPECT_THROW(relative_error(DenseMatrix::Zero(3, 2), t), ShapeError);
}

}  // namespace
}  // namespace robust_mc
